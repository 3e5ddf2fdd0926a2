import pytest

from grasp.datafiles import data_path, load_profiles_dir


@pytest.fixture(scope="session")
def site_profiles():
    """The nine bundled site profiles, loaded once for the whole run."""
    return load_profiles_dir(data_path("sites"))

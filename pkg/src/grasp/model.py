"""Topology and controller configuration.

Nodes are switches, data centers, and clients.  A topology file wires
switches together through numbered ports and attaches hosts to switch
ports; every node gets a deterministic IP/MAC pair unless the file pins
one explicitly.
"""

import json
from dataclasses import dataclass, field, replace

from .errors import ParseError, ValidationError

SWITCH = "switch"
DATACENTER = "datacenter"
CLIENT = "client"

_KIND_PREFIX = {SWITCH: "s", DATACENTER: "d", CLIENT: "c"}
_KIND_CODE = {SWITCH: 0, DATACENTER: 1, CLIENT: 2}

SCHEDULER_NAMES = ("green_aware", "round_robin")

# Energy reports must at least carry this parameter; the scheduler keys on it.
GREEN_ENERGY_PARAM = "green_energy_wh"


@dataclass(frozen=True, order=True)
class NodeId:
    """Stable identity of a node: kind plus position in its topology list."""

    kind: str
    index: int

    def __str__(self):
        return f"{_KIND_PREFIX[self.kind]}{self.index}"


@dataclass(frozen=True)
class Address:
    """IP and MAC of a node, both stored as integers."""

    ip: int
    mac: int


def format_ip(ip):
    return "%d.%d.%d.%d" % ((ip >> 24) & 255, (ip >> 16) & 255, (ip >> 8) & 255, ip & 255)


def format_mac(mac):
    return ":".join("%02x" % ((mac >> s) & 255) for s in range(40, -8, -8))


def parse_ip(text):
    parts = text.split(".")
    if len(parts) != 4 or not all(p.isdigit() and int(p) <= 255 for p in parts):
        raise ParseError(f"bad IP address {text!r}")
    return (int(parts[0]) << 24) | (int(parts[1]) << 16) | (int(parts[2]) << 8) | int(parts[3])


def parse_mac(text):
    parts = text.split(":")
    if len(parts) != 6:
        raise ParseError(f"bad MAC address {text!r}")
    try:
        octets = [int(p, 16) for p in parts]
    except ValueError:
        raise ParseError(f"bad MAC address {text!r}") from None
    if not all(0 <= o <= 255 for o in octets):
        raise ParseError(f"bad MAC address {text!r}")
    value = 0
    for o in octets:
        value = (value << 8) | o
    return value


def auto_address(node):
    """Deterministic address for a node: 10.<kind>.x.y, locally administered MAC."""
    host = node.index + 1
    ip = (10 << 24) | (_KIND_CODE[node.kind] << 16) | ((host >> 8) << 8) | (host & 255)
    mac = 0x020000000000 | (_KIND_CODE[node.kind] << 16) | host
    return Address(ip=ip, mac=mac)


@dataclass(frozen=True)
class Link:
    """Bidirectional switch-to-switch cable: (a, a_port) <-> (b, b_port)."""

    a: NodeId
    a_port: int
    b: NodeId
    b_port: int


@dataclass(frozen=True)
class Attachment:
    """A host (data center or client) plugged into one switch port."""

    node: NodeId
    name: str
    switch: NodeId
    port: int


@dataclass
class DataCenterRecord:
    """What the controller stores about one registered data center."""

    dc_id: int
    name: str
    ip: int
    mac: int
    switch: NodeId
    port: int
    passcode: bytes


@dataclass
class AdjacencyEntry:
    """Discovered neighbor: packets from `switch` reach `neighbor` via `port`."""

    switch: NodeId
    neighbor: NodeId
    port: int
    neighbor_mac: int


@dataclass
class Topology:
    switch_names: list
    links: list
    datacenters: list
    clients: list
    addresses: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.addresses:
            for node in self.nodes():
                self.addresses[node] = auto_address(node)

    def nodes(self):
        out = [NodeId(SWITCH, i) for i in range(len(self.switch_names))]
        out += [a.node for a in self.datacenters]
        out += [a.node for a in self.clients]
        return out

    def switch_id(self, name):
        try:
            return NodeId(SWITCH, self.switch_names.index(name))
        except ValueError:
            raise ValidationError("switch", f"unknown switch {name!r}") from None

    def node_name(self, node):
        if node.kind == SWITCH:
            return self.switch_names[node.index]
        group = self.datacenters if node.kind == DATACENTER else self.clients
        return group[node.index].name

    def ports(self, switch):
        """Map port -> (peer node, peer port or None for hosts) on one switch."""
        table = {}
        for link in self.links:
            if link.a == switch:
                table[link.a_port] = (link.b, link.b_port)
            if link.b == switch:
                table[link.b_port] = (link.a, link.a_port)
        for att in self.datacenters + self.clients:
            if att.switch == switch:
                table[att.port] = (att.node, None)
        return table

    def switch_link_pairs(self):
        """Directed (switch, neighbor) pairs, one per link direction."""
        pairs = set()
        for link in self.links:
            pairs.add((link.a, link.b))
            pairs.add((link.b, link.a))
        return pairs

    def to_dict(self):
        def att_entry(att):
            addr = self.addresses[att.node]
            return {
                "name": att.name,
                "switch": self.switch_names[att.switch.index],
                "port": att.port,
                "ip": format_ip(addr.ip),
                "mac": format_mac(addr.mac),
            }

        return {
            "switches": list(self.switch_names),
            "links": [
                {
                    "a": self.switch_names[l.a.index],
                    "a_port": l.a_port,
                    "b": self.switch_names[l.b.index],
                    "b_port": l.b_port,
                }
                for l in self.links
            ],
            "datacenters": [att_entry(a) for a in self.datacenters],
            "clients": [att_entry(a) for a in self.clients],
        }


def _require(condition, field_name, message):
    if not condition:
        raise ValidationError(field_name, message)


def topology_from_dict(data):
    _require(isinstance(data, dict), "topology", "top level must be a JSON object")
    for key in ("switches", "links", "datacenters", "clients"):
        _require(key in data, key, "missing key")
        _require(isinstance(data[key], list), key, "must be a list")

    names = data["switches"]
    _require(len(names) >= 1, "switches", "need at least one switch")
    _require(all(isinstance(n, str) and n for n in names), "switches", "names must be non-empty strings")
    _require(len(set(names)) == len(names), "switches", "duplicate switch name")
    index_of = {n: i for i, n in enumerate(names)}

    used_ports = set()

    def claim_port(switch, port, where):
        _require(isinstance(port, int) and port > 0, where, f"port must be a positive integer, got {port!r}")
        _require((switch, port) not in used_ports, where, f"port {port} on {names[switch.index]!r} used twice")
        used_ports.add((switch, port))

    links = []
    for i, raw in enumerate(data["links"]):
        where = f"links[{i}]"
        _require(isinstance(raw, dict), where, "must be an object")
        for k in ("a", "a_port", "b", "b_port"):
            _require(k in raw, where, f"missing {k!r}")
        _require(raw["a"] in index_of, where, f"unknown switch {raw['a']!r}")
        _require(raw["b"] in index_of, where, f"unknown switch {raw['b']!r}")
        _require(raw["a"] != raw["b"], where, "link endpoints must differ")
        a = NodeId(SWITCH, index_of[raw["a"]])
        b = NodeId(SWITCH, index_of[raw["b"]])
        claim_port(a, raw["a_port"], where)
        claim_port(b, raw["b_port"], where)
        links.append(Link(a, raw["a_port"], b, raw["b_port"]))

    pinned = {}

    def read_attachments(key, kind):
        out = []
        seen = set()
        for i, raw in enumerate(data[key]):
            where = f"{key}[{i}]"
            _require(isinstance(raw, dict), where, "must be an object")
            for k in ("name", "switch", "port"):
                _require(k in raw, where, f"missing {k!r}")
            _require(isinstance(raw["name"], str) and raw["name"], where, "name must be a non-empty string")
            _require(raw["name"] not in seen, where, f"duplicate name {raw['name']!r}")
            seen.add(raw["name"])
            _require(raw["switch"] in index_of, where, f"unknown switch {raw['switch']!r}")
            switch = NodeId(SWITCH, index_of[raw["switch"]])
            claim_port(switch, raw["port"], where)
            node = NodeId(kind, i)
            if "ip" in raw or "mac" in raw:
                auto = auto_address(node)
                ip = parse_ip(raw["ip"]) if "ip" in raw else auto.ip
                mac = parse_mac(raw["mac"]) if "mac" in raw else auto.mac
                pinned[node] = Address(ip=ip, mac=mac)
            out.append(Attachment(node=node, name=raw["name"], switch=switch, port=raw["port"]))
        return out

    datacenters = read_attachments("datacenters", DATACENTER)
    clients = read_attachments("clients", CLIENT)

    topo = Topology(switch_names=list(names), links=links, datacenters=datacenters, clients=clients)
    topo.addresses.update(pinned)

    ips = [a.ip for a in topo.addresses.values()]
    _require(len(set(ips)) == len(ips), "addresses", "duplicate IP address")
    return topo


def load_topology(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return topology_from_dict(data)


@dataclass
class PanelConfig:
    """Flat-plate PV panel coefficients; the defaults describe a 1 m^2 panel."""

    area_m2: float = 1.0
    efficiency: float = 0.2
    temp_coeff_per_c: float = 0.005
    reference_temp_c: float = 25.0
    irradiance_heating: float = 0.03  # degC of cell heating per W/m^2 of GHI


@dataclass
class ControllerConfig:
    parameters: list = field(default_factory=lambda: [GREEN_ENERGY_PARAM])
    weights: list = field(default_factory=lambda: [1.0])
    report_period: float = 3600.0
    flow_idle_timeout: float = 2.0
    scheduler: str = "green_aware"
    job_energy_wh: float = 1.0
    nsrdb_temp_column: str = "dry_bulb_c"
    nsrdb_ghi_column: str = "ghi_whm2"
    panel: PanelConfig = field(default_factory=PanelConfig)

    def with_overrides(self, scheduler=None, job_energy_wh=None):
        cfg = replace(self)
        if scheduler is not None:
            cfg.scheduler = scheduler
        if job_energy_wh is not None:
            cfg.job_energy_wh = job_energy_wh
        validate_config(cfg)
        return cfg


def validate_config(cfg):
    _require(isinstance(cfg.parameters, list) and cfg.parameters, "parameters", "must be a non-empty list")
    _require(all(isinstance(p, str) and p for p in cfg.parameters), "parameters", "entries must be non-empty strings")
    _require(len(set(cfg.parameters)) == len(cfg.parameters), "parameters", "duplicate parameter name")
    _require(GREEN_ENERGY_PARAM in cfg.parameters, "parameters", f"must include {GREEN_ENERGY_PARAM!r}")
    _require(len(cfg.weights) == len(cfg.parameters), "weights", "must match parameters in length")
    _require(all(isinstance(w, (int, float)) for w in cfg.weights), "weights", "entries must be numbers")
    _require(cfg.report_period > 0, "report_period", "must be > 0")
    _require(cfg.flow_idle_timeout > 0, "flow_idle_timeout", "must be > 0")
    _require(cfg.scheduler in SCHEDULER_NAMES, "scheduler", f"must be one of {SCHEDULER_NAMES}")
    _require(cfg.job_energy_wh > 0, "job_energy_wh", "must be > 0")
    panel = cfg.panel
    _require(panel.area_m2 > 0, "panel.area_m2", "must be > 0")
    _require(0 < panel.efficiency <= 1, "panel.efficiency", "must be in (0, 1]")
    _require(panel.temp_coeff_per_c >= 0, "panel.temp_coeff_per_c", "must be >= 0")
    _require(panel.irradiance_heating >= 0, "panel.irradiance_heating", "must be >= 0")
    return cfg


def config_from_dict(data):
    _require(isinstance(data, dict), "config", "top level must be a JSON object")
    known = {
        "parameters", "weights", "report_period", "flow_idle_timeout",
        "scheduler", "job_energy_wh", "nsrdb", "panel",
    }
    for key in data:
        _require(key in known, key, "unknown config key")

    cfg = ControllerConfig()
    if "parameters" in data:
        cfg.parameters = data["parameters"]
        # default weight vector tracks an explicit parameter list
        if "weights" not in data and isinstance(data["parameters"], list):
            cfg.weights = [1.0] * len(data["parameters"])
    if "weights" in data:
        cfg.weights = data["weights"]
    for key in ("report_period", "flow_idle_timeout", "job_energy_wh"):
        if key in data:
            _require(isinstance(data[key], (int, float)), key, "must be a number")
            setattr(cfg, key, float(data[key]))
    if "scheduler" in data:
        cfg.scheduler = data["scheduler"]
    nsrdb = data.get("nsrdb", {})
    _require(isinstance(nsrdb, dict), "nsrdb", "must be an object")
    if "temp_column" in nsrdb:
        cfg.nsrdb_temp_column = nsrdb["temp_column"]
    if "ghi_column" in nsrdb:
        cfg.nsrdb_ghi_column = nsrdb["ghi_column"]
    panel = data.get("panel", {})
    _require(isinstance(panel, dict), "panel", "must be an object")
    panel_fields = {
        "area_m2", "efficiency", "temp_coeff_per_c", "reference_temp_c", "irradiance_heating",
    }
    for key, value in panel.items():
        _require(key in panel_fields, f"panel.{key}", "unknown panel key")
        _require(isinstance(value, (int, float)), f"panel.{key}", "must be a number")
        setattr(cfg.panel, key, float(value))
    return validate_config(cfg)


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return config_from_dict(data)

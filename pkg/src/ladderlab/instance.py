"""Instance files: a field, ladder parameters, ladders and named colourings.

Grammar (line oriented, ``#`` starts a comment)::

    [field]
    GF(2^1;0,1)
    [params]
    horizon = 5
    length = 1
    window = 0
    S = 3, 4
    [ladders]
    3 = (1:1)
    4 = (1:1)
    [colourings]
    zero = 3:0; 4:0
    [generate]
    seed = 1
    regime = separated

``[ladders]`` may be omitted when ``[generate]`` is present; the ladders are
then drawn by the seeded generator.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algebra import FieldCtx, Vec, parse_field_spec
from .colouring import Colouring, FilterD, check_shape
from .errors import LadderLabError, ParseError, ValidationError
from .ladder import GenParams, LadderSystem, generate, validate

SECTIONS = ("field", "params", "ladders", "colourings", "generate")
_SECTION_RE = re.compile(r"^\[(\w+)\]$")
_VEC_TOKEN_RE = re.compile(r"\([^()]*\)")


@dataclass
class Instance:
    sys: LadderSystem
    D: FilterD
    colourings: dict[str, Colouring] = field(default_factory=dict)
    seed: int | None = None
    regime: str | None = None
    name: str = ""

    @property
    def field(self) -> FieldCtx:
        return self.sys.field

    @property
    def digest(self) -> str:
        return hashlib.sha256(format_instance(self).encode()).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.sys, self.D, self.colourings, self.seed, self.regime) == \
            (other.sys, other.D, other.colourings, other.seed, other.regime)


def _ints(text: str, lineno: int) -> list[int]:
    try:
        return [int(t) for t in re.split(r"[,\s]+", text.strip()) if t]
    except ValueError:
        raise ParseError(lineno, f"expected integers, got {text!r}") from None


def _key_value(line: str, lineno: int) -> tuple[str, str]:
    key, sep, value = line.partition("=")
    if not sep:
        raise ParseError(lineno, f"expected 'key = value', got {line!r}")
    return key.strip(), value.strip()


def parse_colouring(text: str, S: tuple[int, ...], length: int) -> Colouring:
    """``delta:v,v; delta:v,v``; every delta of S must appear once."""
    mapping: dict[int, tuple[int, ...]] = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        d, sep, vals = part.partition(":")
        if not sep:
            raise ValueError(f"malformed colouring entry {part!r}")
        delta = int(d)
        if delta in mapping:
            raise ValueError(f"delta={delta} coloured twice")
        mapping[delta] = tuple(int(v) for v in vals.split(",") if v.strip())
    if tuple(sorted(mapping)) != tuple(S):
        raise ValueError(f"colouring covers {sorted(mapping)}, S is {list(S)}")
    if any(len(v) != length for v in mapping.values()):
        raise ValueError(f"every colouring row needs {length} values")
    return Colouring.from_mapping(mapping) if mapping else Colouring((), ())


def parse_instance_text(text: str, name: str = "") -> Instance:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1)
            if current not in SECTIONS:
                raise ParseError(lineno, f"unknown section [{current}]")
            if current in sections:
                raise ParseError(lineno, f"section [{current}] repeated")
            sections[current] = []
            continue
        if current is None:
            raise ParseError(lineno, "content before the first section")
        sections[current].append((lineno, line))

    for needed in ("field", "params"):
        if needed not in sections:
            raise ParseError(0, f"missing section [{needed}]")

    field_lines = sections["field"]
    if len(field_lines) != 1:
        raise ParseError(field_lines[0][0] if field_lines else 0, "[field] needs exactly one line")
    lineno, spec = field_lines[0]
    try:
        F = parse_field_spec(spec)
    except (ValueError, LadderLabError) as exc:
        raise ParseError(lineno, str(exc)) from None

    params: dict[str, tuple[int, str]] = {}
    for lineno, line in sections["params"]:
        key, value = _key_value(line, lineno)
        if key not in ("horizon", "length", "window", "S"):
            raise ParseError(lineno, f"unknown parameter {key!r}")
        params[key] = (lineno, value)
    for key in ("horizon", "length", "window", "S"):
        if key not in params:
            raise ParseError(0, f"missing parameter {key!r}")
    horizon = _ints(params["horizon"][1], params["horizon"][0])
    length = _ints(params["length"][1], params["length"][0])
    if len(horizon) != 1 or len(length) != 1:
        raise ParseError(params["horizon"][0], "horizon and length take one integer each")
    horizon, length = horizon[0], length[0]
    window = _ints(params["window"][1], params["window"][0])
    S = tuple(_ints(params["S"][1], params["S"][0]))
    try:
        D = FilterD(length, frozenset(window))
    except ValueError as exc:
        raise ParseError(params["window"][0], str(exc)) from None

    seed = regime = None
    if "generate" in sections:
        for lineno, line in sections["generate"]:
            key, value = _key_value(line, lineno)
            if key == "seed":
                seed = _ints(value, lineno)[0]
            elif key == "regime":
                regime = value
            else:
                raise ParseError(lineno, f"unknown generate key {key!r}")

    if "ladders" in sections:
        ladders: dict[int, tuple[Vec, ...]] = {}
        for lineno, line in sections["ladders"]:
            key, value = _key_value(line, lineno)
            try:
                delta = int(key)
                tokens = _VEC_TOKEN_RE.findall(value)
                if _VEC_TOKEN_RE.sub("", value).strip():
                    raise ValueError(f"stray text in {value!r}")
                steps = tuple(Vec.parse(t, horizon) for t in tokens)
            except (ValueError, LadderLabError) as exc:
                raise ParseError(lineno, str(exc)) from None
            if delta in ladders:
                raise ParseError(lineno, f"ladder for delta={delta} given twice")
            if any(not 0 < c < F.q for y in steps for _, c in y.entries):
                raise ParseError(lineno, f"coefficient outside {F}")
            ladders[delta] = steps
        if tuple(sorted(ladders)) != tuple(sorted(S)):
            raise ParseError(sections["ladders"][0][0] if sections["ladders"] else 0,
                             f"ladders given for {sorted(ladders)}, S is {list(S)}")
        sys = LadderSystem(F, horizon, length, S, tuple(ladders[d] for d in S))
    elif seed is not None:
        try:
            sys = generate(seed, GenParams(horizon, length, S, tuple(sorted(window)),
                                           regime or "separated", F))
        except (ValueError, LadderLabError) as exc:
            raise ValidationError("shape", None, None, str(exc)) from None
    else:
        raise ParseError(0, "need [ladders] or a [generate] seed")

    report = validate(sys)
    if not report.ok:
        v = report.violations[0]
        raise ValidationError(v.clause, v.delta, v.n, v.message, report.violations)

    colourings: dict[str, Colouring] = {}
    for lineno, line in sections.get("colourings", []):
        key, value = _key_value(line, lineno)
        if key in colourings:
            raise ParseError(lineno, f"colouring {key!r} defined twice")
        try:
            c = parse_colouring(value, sys.S, length)
            check_shape(sys, c)
        except (ValueError, LadderLabError) as exc:
            raise ParseError(lineno, str(exc)) from None
        colourings[key] = c
    return Instance(sys, D, colourings, seed, regime, name)


def parse_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance_text(path.read_text(encoding="utf-8"), path.stem)


def format_instance(inst: Instance) -> str:
    """Canonical text; ``parse_instance_text(format_instance(x)) == x``."""
    sys = inst.sys
    lines = ["[field]", str(sys.field), "[params]",
             f"horizon = {sys.horizon}",
             f"length = {sys.length}",
             "window = " + ", ".join(map(str, inst.D.sorted_window)),
             "S = " + ", ".join(map(str, sys.S)),
             "[ladders]"]
    for delta, ladder in sys.items():
        lines.append(f"{delta} = " + " ".join(str(y) for y in ladder))
    if inst.colourings:
        lines.append("[colourings]")
        for key, c in inst.colourings.items():
            lines.append(f"{key} = {c}")
    if inst.seed is not None:
        lines += ["[generate]", f"seed = {inst.seed}"]
        if inst.regime is not None:
            lines.append(f"regime = {inst.regime}")
    return "\n".join(lines) + "\n"


def bundled_path(name: str) -> Path:
    """Path of a fixture shipped in ``ladderlab/data``."""
    if not name.endswith(".inst"):
        name += ".inst"
    return Path(str(resources.files("ladderlab") / "data" / name))


def load(path_or_name: str | Path) -> Instance:
    """Parse a file, falling back to the bundled fixtures by name."""
    p = Path(path_or_name)
    if not p.exists():
        candidate = bundled_path(str(path_or_name))
        if candidate.exists():
            p = candidate
    return parse_instance(p)

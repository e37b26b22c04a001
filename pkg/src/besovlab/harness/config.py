"""Suite configuration and its flat ``key = value`` file format.

Example::

    # suites to run, in this order
    suites = scaling, lemma21, hardy
    corpus.names = bump, tent, plateau
    corpus.dim = 1
    corpus.resolution = 64
    params = 0.3/1/1; 0.2/2/2; 0.5/0.8/0.8
    tolerance.scaling = 0.03
    seed = 42

Blank lines and ``#`` comments are ignored. Unknown keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..besov import BesovQuadConfig
from ..core import CORPUS_CATALOG, BesovParams, CorpusSpec

__all__ = [
    "SUITES",
    "DEFAULT_TOLERANCES",
    "DEFAULT_PARAMS",
    "SuiteConfig",
    "parse_config",
    "load_config",
    "format_params",
]

SUITES = (
    "scaling",
    "lemma21",
    "sobolev_chain",
    "capacitary_chain",
    "hardy",
    "rearrange",
    "coarea",
    "perimeter_capacity",
    "isocap_report",
)

DEFAULT_TOLERANCES = {
    "exact": 1e-10,
    "scaling": 0.03,
    "lemma21": 1e-12,
    "sobolev_chain": 0.05,
    "capacitary_chain": 0.05,
    "hardy": 0.03,
    "rearrange": 1e-9,
    "coarea": 0.05,
    "perimeter_capacity": 0.05,
    "isocap_report": 0.0,
}

# three or more tuples per regime, (beta, p, q)
DEFAULT_PARAMS = (
    (0.3, 1.0, 1.0),
    (0.2, 2.0, 2.0),
    (0.4, 1.5, 1.5),
    (0.3, 1.0, 2.0),
    (0.5, 0.8, 0.8),
    (0.3, 0.9, 0.9),
    (0.6, 0.75, 0.75),
)

DEFAULT_NAMES = ("bump", "tent", "two_bump", "trunc_power", "plateau")


@dataclass(frozen=True)
class SuiteConfig:
    suites: tuple[str, ...] = SUITES
    corpus: CorpusSpec = field(default_factory=lambda: CorpusSpec(DEFAULT_NAMES, 1, 64, 42))
    params: tuple[BesovParams, ...] = ()
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out_path: str | None = None
    seed: int = 42
    quad: BesovQuadConfig = field(default_factory=BesovQuadConfig)
    perimeter_samples: int = 10_000
    capacity_resolution: int = 128
    capacity_eps: tuple[float, ...] = tuple(2.0 ** -k for k in range(1, 7))
    capacity_profile: str = "linear"
    limit_resolution: int = 1024
    threads: int = 1
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "suites", tuple(self.suites))
        for s in self.suites:
            if s not in SUITES:
                raise ValueError(f"unknown suite {s!r}; catalog: {', '.join(SUITES)}")
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances)
        for k, v in tol.items():
            if k not in DEFAULT_TOLERANCES:
                raise ValueError(f"unknown tolerance key {k!r}")
            if not (v > 0 or (k == "isocap_report" and v == 0)):
                raise ValueError(f"tolerance for {k} must be positive, got {v}")
        object.__setattr__(self, "tolerances", tol)
        if not self.params:
            n = self.corpus.dim
            object.__setattr__(self, "params", tuple(
                BesovParams(b, p, q, n) for b, p, q in DEFAULT_PARAMS))
        else:
            object.__setattr__(self, "params", tuple(
                P if P.dim == self.corpus.dim else P.with_dim(self.corpus.dim)
                for P in self.params))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.capacity_profile not in ("linear", "smooth3", "smooth5"):
            raise ValueError("capacity.profile must be linear, smooth3 or smooth5")

    def with_overrides(self, **kw) -> "SuiteConfig":
        if "seed" in kw:
            kw["corpus"] = replace(self.corpus, seed=kw["seed"])
        return replace(self, **kw)

    def echo(self) -> dict:
        """Resolved configuration as plain JSON data (threads excluded)."""
        return {
            "suites": list(self.suites),
            "corpus": {
                "names": list(self.corpus.names),
                "dim": self.corpus.dim,
                "resolution": self.corpus.resolution,
                "seed": int(self.corpus.seed),
            },
            "params": [format_params(P) for P in self.params],
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
            "seed": int(self.seed),
            "besov": {
                "radial_points": self.quad.radial_points,
                "angular_points": self.quad.angular_points,
                "r_min": self.quad.r_min,
                "r_max": self.quad.r_max,
                "tail_correction": self.quad.tail_correction,
            },
            "perimeter": {"outer_samples": self.perimeter_samples},
            "capacity": {
                "resolution": self.capacity_resolution,
                "eps_grid": list(self.capacity_eps),
                "profile": self.capacity_profile,
                "limit_resolution": self.limit_resolution,
            },
        }


def format_params(P: BesovParams) -> str:
    return f"{P.beta:g}/{P.p:g}/{P.q:g}"


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_int(text: str) -> int | None:
    return None if text.strip().lower() in ("", "auto", "none") else int(text)


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "auto", "none") else float(text)


def _parse_params(text: str, dim: int) -> tuple[BesovParams, ...]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split("/")
        if len(parts) != 3:
            raise ValueError(f"params entries are beta/p/q, got {chunk!r}")
        b, p, q = (float(x) for x in parts)
        out.append(BesovParams(b, p, q, dim))
    return tuple(out)


KEYS = (
    "suites", "corpus.names", "corpus.dim", "corpus.resolution", "corpus.seed",
    "params", "out", "seed", "threads", "timing",
    "besov.radial_points", "besov.angular_points", "besov.r_min", "besov.r_max",
    "besov.tail_correction", "perimeter.outer_samples",
    "capacity.resolution", "capacity.eps_grid", "capacity.profile",
    "capacity.limit_resolution",
) + tuple(f"tolerance.{k}" for k in DEFAULT_TOLERANCES)


def parse_config(text: str) -> SuiteConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    seed = int(raw.get("seed", 42))
    dim = int(raw.get("corpus.dim", 1))
    corpus = CorpusSpec(
        _names(raw["corpus.names"]) if "corpus.names" in raw else DEFAULT_NAMES,
        dim,
        int(raw.get("corpus.resolution", 64)),
        int(raw.get("corpus.seed", seed)),
    )
    for nm in corpus.names:
        if nm.partition(":")[0] not in CORPUS_CATALOG:
            raise ValueError(f"unknown corpus entry {nm!r}")
    quad = BesovQuadConfig(
        radial_points=int(raw.get("besov.radial_points", 64)),
        angular_points=_optional_int(raw.get("besov.angular_points", "auto")),
        r_min=_optional_float(raw.get("besov.r_min", "auto")),
        r_max=_optional_float(raw.get("besov.r_max", "auto")),
        tail_correction=_bool(raw.get("besov.tail_correction", "true")),
    )
    tolerances = {k.split(".", 1)[1]: float(v) for k, v in raw.items() if k.startswith("tolerance.")}
    kw = dict(
        suites=_names(raw["suites"]) if "suites" in raw else SUITES,
        corpus=corpus,
        params=_parse_params(raw["params"], dim) if "params" in raw else (),
        tolerances=tolerances,
        out_path=raw.get("out"),
        seed=seed,
        quad=quad,
        threads=int(raw.get("threads", 1)),
        timing=_bool(raw.get("timing", "false")),
    )
    if "perimeter.outer_samples" in raw:
        kw["perimeter_samples"] = int(raw["perimeter.outer_samples"])
    if "capacity.resolution" in raw:
        kw["capacity_resolution"] = int(raw["capacity.resolution"])
    if "capacity.eps_grid" in raw:
        kw["capacity_eps"] = _floats(raw["capacity.eps_grid"])
    if "capacity.profile" in raw:
        kw["capacity_profile"] = raw["capacity.profile"]
    if "capacity.limit_resolution" in raw:
        kw["limit_resolution"] = int(raw["capacity.limit_resolution"])
    return SuiteConfig(**kw)


def load_config(path: str) -> SuiteConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


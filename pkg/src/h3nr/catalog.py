"""Group catalog, the full invariant pipeline, result records and tables."""

import dataclasses
import hashlib
import json
import os
import pickle
import tempfile
import time
from pathlib import Path

from . import groups as grp
from . import resolutions as res
from .cohomology import CohomologyData
from .negligible import RefusedError, SubgroupOfH4, h4n, h4p
from .unramified import EXHAUSTIVE_BOUND, bogomolov_multiplier, choose_hi_pairs, h4nr

DATA_DIR = Path(__file__).parent / "data"
CACHE_VERSION = 1


@dataclasses.dataclass(frozen=True)
class CatalogEntry:
    name: str
    path: Path
    order: int
    provenance: str = ""
    family: str | None = None

    def load(self):
        G = grp.from_presentation(self.path.read_text())
        if G.order != self.order:
            raise ValueError(f"{self.name}: presentation gives order {G.order}, expected {self.order}")
        return G


def _parse_header(path):
    order, family, prov = None, None, ""
    for line in path.read_text().splitlines():
        if not line.startswith("#"):
            break
        text = line[1:].strip()
        if text.startswith("order "):
            order = int(text.split()[1])
        elif text.startswith("family "):
            family = text.split()[1]
        elif not prov:
            prov = text
    return order, family, prov


def load_catalog(directory=DATA_DIR):
    """All catalog entries keyed by name."""
    out = {}
    for path in sorted(Path(directory).glob("*.txt")):
        order, family, prov = _parse_header(path)
        if order is None:
            continue
        out[path.stem] = CatalogEntry(path.stem, path, order, prov, family)
    return out


def entry(name, directory=DATA_DIR):
    """Catalog entry by name, or an entry for a presentation file path."""
    p = Path(name)
    if p.suffix == ".txt" and p.exists():
        order, family, prov = _parse_header(p)
        if order is None:
            order = grp.from_presentation(p.read_text()).order
        return CatalogEntry(p.stem, p, order, prov, family)
    cat = load_catalog(directory)
    if name not in cat:
        raise KeyError(f"unknown catalog group {name}")
    return cat[name]


def family(tag, directory=DATA_DIR):
    return [e for e in load_catalog(directory).values() if e.family == tag]


# -- disk cache ------------------------------------------------------------------

class DiskCache(res.ResolutionCache):
    """Resolution cache persisted as pickles in a directory.

    Files are content addressed by the multiplication table, strategy and
    length, and carry the cache version; files from another version are
    ignored.  Writes go through a temporary file and an atomic rename.
    """

    def __init__(self, directory):
        super().__init__()
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, G, length, strategy):
        h = hashlib.sha256()
        h.update(G.mul.tobytes())
        h.update(f"{G.order}|{length}|{strategy}".encode())
        return self.directory / f"res-{h.hexdigest()[:32]}.v{CACHE_VERSION}.pkl"

    def get(self, G, length=res.DEFAULT_LENGTH, strategy=None):
        key = (res.fingerprint(G), length, strategy)
        for H, R in self._store.get(key, []):
            if H is G or (H.order == G.order and (H.mul == G.mul).all()):
                return R
        path = self._path(G, length, strategy)
        R = None
        if path.exists():
            with open(path, "rb") as f:
                version, R = pickle.load(f)
            if version != CACHE_VERSION or not (R.group.mul == G.mul).all():
                R = None
        if R is None:
            R = res.resolution_for(G, length, strategy)
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "wb") as f:
                pickle.dump((CACHE_VERSION, R), f)
            os.replace(tmp, path)
        self._store.setdefault(key, []).append((G, R))
        return R


# -- pipeline ----------------------------------------------------------------------

@dataclasses.dataclass
class PipelineConfig:
    strategy: str | None = None
    length: int = res.DEFAULT_LENGTH
    subgroup_filter: bool = True
    h1_trivial: bool = False
    exhaustive_cosets: bool = True
    bound: int = EXHAUSTIVE_BOUND
    cache_dir: str | None = None


FIELDS = ["H4", "H4_nr", "H4_p", "H4_n", "H3_s", "H3_nr", "B0"]


@dataclasses.dataclass
class ResultRecord:
    """Torsion coefficients of every invariant of one group.

    A field is None when it is not available (H4_n and what depends on it
    for 2-groups).  generators holds, for each subgroup of H^4, a generating
    set in H^4 coordinates, so the containments can be checked afterwards.
    """

    group: str
    H4: list
    H4_nr: list | None
    H4_p: list | None
    H4_n: list | None
    H3_s: list | None
    H3_nr: list | None
    B0: list | None
    timing: dict
    strategy: dict
    generators: dict = dataclasses.field(default_factory=dict)

    def to_json(self, timing=True):
        d = dataclasses.asdict(self)
        if not timing:
            d.pop("timing")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def containment_chain_holds(self):
        """H4_p <= H4_n <= H4_nr <= H4, checked on the stored generators."""
        import itertools
        from . import zmatrix
        tors = self.H4
        k = len(tors)
        diag = [[t if i == j else 0 for j in range(k)] for i, t in enumerate(tors)]
        chain = [f for f in ("H4_p", "H4_n", "H4_nr") if self.generators.get(f) is not None]
        for a, b in itertools.pairwise(chain):
            basis = zmatrix.lattice_basis(self.generators[b] + diag, ncols=k) if k else []
            for v in self.generators[a]:
                if k and zmatrix.solve_left(v, basis) is None:
                    return False
        return True


def cache_for(config):
    return DiskCache(config.cache_dir) if config.cache_dir else res.default_cache


def run_pipeline(entry_or_group, config=None, name=None):
    """Compute every invariant for one catalog entry (or a FiniteGroup)."""
    config = PipelineConfig() if config is None else config
    cache = cache_for(config)
    if isinstance(entry_or_group, CatalogEntry):
        G = entry_or_group.load()
        name = entry_or_group.name
    else:
        G = entry_or_group
        name = name or f"group_{G.order}"
    timing = {}
    t0 = time.perf_counter()
    RG = cache.get(G, config.length, config.strategy)
    timing["resolution"] = time.perf_counter() - t0
    t = time.perf_counter()
    data = CohomologyData(RG, 4)
    timing["cohomology"] = time.perf_counter() - t
    t = time.perf_counter()
    P = h4p(RG, h1_trivial=config.h1_trivial, data=data)
    timing["h4p"] = time.perf_counter() - t
    t = time.perf_counter()
    try:
        N = h4n(RG, data=data, cache=cache)
    except RefusedError:
        N = None
    timing["h4n"] = time.perf_counter() - t
    t = time.perf_counter()
    pairs = choose_hi_pairs(G, config.subgroup_filter, cache=cache)
    mode = "exhaustive" if config.exhaustive_cosets else "kernel"
    NR = h4nr(RG, P=N if N is not None else P, data=data, pairs=pairs, mode=mode, bound=config.bound)
    timing["h4nr"] = time.perf_counter() - t
    t = time.perf_counter()
    B0 = bogomolov_multiplier(G, RG)
    timing["b0"] = time.perf_counter() - t
    timing["total"] = time.perf_counter() - t0
    gens = {"H4_p": _gens(P), "H4_nr": _gens(NR), "H4_n": _gens(N) if N is not None else None}
    return ResultRecord(
        group=name,
        H4=list(data.torsion_coefficients),
        H4_nr=NR.invariants(),
        H4_p=P.invariants(),
        H4_n=N.invariants() if N is not None else None,
        H3_s=N.quotient_invariants() if N is not None else None,
        H3_nr=NR.quotient_invariants(N) if N is not None else None,
        B0=B0,
        timing=timing,
        strategy={"resolution": getattr(RG, "strategy", type(RG).__name__),
                  "dims": list(RG.dims), "length": RG.length, "pairs": len(pairs),
                  "subgroup_filter": config.subgroup_filter, "h1_trivial": config.h1_trivial,
                  "h4nr_mode": mode},
        generators=gens,
    )


def _gens(S: SubgroupOfH4):
    return [list(v.coefficients) for v in S.generators()]


# -- tables ----------------------------------------------------------------------

def format_invariants(inv):
    """Torsion coefficients as a direct sum, e.g. (Z/3)^2+Z/9; None is n/a."""
    if inv is None:
        return "n/a"
    if not inv:
        return "0"
    parts = []
    for t in sorted(set(inv)):
        c = inv.count(t)
        parts.append(f"Z/{t}" if c == 1 else f"(Z/{t})^{c}")
    return "+".join(parts)


def emit_table(records, fmt="tsv"):
    """Render records as TSV, JSON or a markdown table, one row per record."""
    records = list(records)
    if fmt == "json":
        out = []
        for r in records:
            d = dataclasses.asdict(r)
            d.pop("timing")
            out.append(d)
        return json.dumps(out, sort_keys=True, indent=1) + "\n"
    header = ["group"] + FIELDS
    rows = [[r.group] + [format_invariants(getattr(r, f)) for f in FIELDS] for r in records]
    if fmt == "tsv":
        return "\n".join("\t".join(row) for row in [header] + rows) + "\n"
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt}")

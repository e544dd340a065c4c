"""Deterministic generation of desk-scale annotated corpora.

Stands in for a large model-annotated patent corpus: every document is
instantiated from a small set of sentence templates with typed blanks, so the
gold BIO tags, semantic edges, and protocol slots are correct by
construction.

Determinism contract: all randomness comes from a single splitmix64 stream
seeded with ``FixtureSpec.seed`` (see :mod:`synthsearch.rng`), draws happen
in a fixed documented order, and numeric values are formatted from integers
only. Same spec ⇒ byte-identical corpus, on any platform.

Tokenization: template text is pre-tokenized (punctuation already split off
as separate tokens); vocabulary values with internal spaces become one token
per space-separated word. Chemical names keep internal punctuation (e.g.
"(5-Methylpyrimidin-2-yl)methanol" is a single token).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from synthsearch.corpus import (
    ProcedureDoc,
    SemanticEdge,
    SentenceGraph,
    Token,
)
from synthsearch.rng import SplitMix64

DEFAULT_REAGENTS = (
    "HATU",
    "triphosgene",
    "trimethylsilyldiazomethane",
    "chlorosulfonic acid",
    "CDI",
    "carbonyldiimidazole",
    "trifluoromethanesulfonic acid",
    "methylmagnesium bromide",
    "sodium borohydride",
    "lithium aluminium hydride",
    "palladium acetate",
    "triethylamine",
    "DIPEA",
    "acetic anhydride",
    "thionyl chloride",
    "oxalyl chloride",
    "sodium azide",
    "potassium carbonate",
    "cesium carbonate",
    "sodium hydride",
    "n-butyllithium",
    "DBU",
    "EDC",
    "HOBt",
    "DMAP",
    "TFA",
    "benzyl bromide",
    "methyl iodide",
    "iodomethane",
    "bromine",
    "NBS",
    "NCS",
    "mCPBA",
    "hydrogen peroxide",
    "ammonium chloride",
    "sodium bicarbonate",
    "hydrochloric acid",
    "sulfuric acid",
    "nitric acid",
    "phosphorus oxychloride",
    "DIAD",
    "triphenylphosphine",
    "DEAD",
    "Boc anhydride",
    "TBSCl",
    "TMSCl",
    "imidazole",
    "pyridine",
    "morpholine",
    "piperidine",
    "aniline",
    "benzaldehyde",
    "acetyl chloride",
    "tosyl chloride",
    "mesyl chloride",
    "sodium methoxide",
    "potassium tert-butoxide",
    "LDA",
    "zinc chloride",
    "ferric chloride",
    "copper iodide",
    "silver nitrate",
    "raney nickel",
    "platinum oxide",
)

DEFAULT_SOLVENTS = (
    "DMF",
    "DCM",
    "THF",
    "chlorobenzene",
    "toluene",
    "acetonitrile",
    "methanol",
    "ethyl acetate",
)

DEFAULT_PRODUCTS = (
    "(5-Methylpyrimidin-2-yl)methanol",
    "2-aminobenzamide",
    "ethyl 4-nitrobenzoate",
    "N-methylpiperazine hydrochloride",
    "tert-butyl carbamate",
    "4-bromoaniline",
)

DEFAULT_SAMPLES = ("plasma", "serum", "urine", "supernatant", "lysate")

DEFAULT_DILUENTS = (
    "saline buffer",
    "PBS",
    "distilled water",
    "deionized water",
    "assay buffer",
    "Tris buffer",
)

DEFAULT_TITRANTS = ("NaOH", "HCl", "KOH", "ammonia")

# two-token equipment so multi-word literal queries have something to hit
DEFAULT_EQUIPMENT = (
    "PTFE filter",
    "nylon filter",
    "glass frit",
    "celite pad",
    "paper filter",
)

DEFAULT_UNITS_MASS = ("mg", "g", "mmol", "mol")
DEFAULT_UNITS_VOLUME = ("ml", "l")
DEFAULT_TIME_UNITS = ("h", "min")
DEFAULT_PORE_SIZES = ("0.2", "0.22", "0.45", "0.7")


@dataclass(frozen=True)
class Vocab:
    """Value pools for template blanks. Every pool must be non-empty."""

    reagents: tuple[str, ...] = DEFAULT_REAGENTS
    solvents: tuple[str, ...] = DEFAULT_SOLVENTS
    products: tuple[str, ...] = DEFAULT_PRODUCTS
    samples: tuple[str, ...] = DEFAULT_SAMPLES
    diluents: tuple[str, ...] = DEFAULT_DILUENTS
    titrants: tuple[str, ...] = DEFAULT_TITRANTS
    equipment: tuple[str, ...] = DEFAULT_EQUIPMENT
    units_mass: tuple[str, ...] = DEFAULT_UNITS_MASS
    units_volume: tuple[str, ...] = DEFAULT_UNITS_VOLUME
    time_units: tuple[str, ...] = DEFAULT_TIME_UNITS
    pore_sizes: tuple[str, ...] = DEFAULT_PORE_SIZES

    def __post_init__(self) -> None:
        for name, pool in vars(self).items():
            if not pool:
                raise ValueError(f"empty vocab list: {name}")


# template name -> sampling weight; weights sum to 10
DEFAULT_TEMPLATES = (
    ("dissolve", 3),
    ("add", 2),
    ("dilute", 1),
    ("titrate", 1),
    ("filter", 1),
    ("yield", 1),
    ("heat", 1),
)


@dataclass(frozen=True)
class FixtureSpec:
    """Everything that determines a generated corpus."""

    seed: int
    n_procedures: int
    vocab: Vocab = field(default_factory=Vocab)
    templates: tuple[tuple[str, int], ...] = DEFAULT_TEMPLATES

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.n_procedures < 0:
            raise ValueError("n_procedures must be non-negative")
        if not self.templates:
            raise ValueError("at least one template required")
        for name, weight in self.templates:
            if name not in _BUILDERS:
                raise ValueError(f"unknown template {name!r}")
            if weight <= 0:
                raise ValueError(f"template {name!r} has non-positive weight")


class _SentenceBuilder:
    """Accumulates (words, label) chunks; mention order is append order."""

    def __init__(self) -> None:
        self.tokens: list[Token] = []
        self.edges: list[SemanticEdge] = []
        self._n_mentions = 0

    def plain(self, *words: str) -> None:
        for w in words:
            self.tokens.append(Token(w, "O"))

    def mention(self, words: str | list[str], label: str) -> int:
        """Add a tagged span; returns its mention index."""
        parts = words.split(" ") if isinstance(words, str) else words
        self.tokens.append(Token(parts[0], f"B-{label}"))
        for w in parts[1:]:
            self.tokens.append(Token(w, f"I-{label}"))
        idx = self._n_mentions
        self._n_mentions += 1
        return idx

    def edge(self, head: int, tail: int, label: str) -> None:
        self.edges.append(SemanticEdge(head, tail, label))

    def build(self) -> SentenceGraph:
        return SentenceGraph.from_bio(
            [t.word for t in self.tokens],
            [t.entity_bio for t in self.tokens],
            self.edges,
        )


def _add_slot(slots: dict[str, list[str]], name: str, value: str) -> None:
    values = slots.setdefault(name, [])
    if value not in values:
        values.append(value)


def _build_dissolve(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    verb = rng.choice(("Dissolve", "Suspend"))
    reagent = rng.choice(v.reagents)
    solvent = rng.choice(v.solvents)
    amount = str((1 + rng.below(99)) * 10)
    unit_m = rng.choice(v.units_mass)
    volume = str(1 + rng.below(50))
    unit_v = rng.choice(v.units_volume)
    hours = str(1 + rng.below(48))
    time_u = rng.choice(v.time_units)
    temp = str(5 * rng.below(25))

    b = _SentenceBuilder()
    m_verb = b.mention(verb, "Action")
    m_reagent = b.mention(reagent, "Reagent")
    b.plain("(")
    m_amount = b.mention([amount, unit_m], "Amount")
    b.plain(")", "in")
    m_solvent = b.mention(solvent, "Reagent")
    b.plain("(")
    m_volume = b.mention([volume, unit_v], "Amount")
    b.plain(")", "and")
    m_stir = b.mention("stir", "Action")
    b.plain("for")
    m_time = b.mention([hours, time_u], "Time")
    b.plain("at")
    m_temp = b.mention([temp, "°C"], "Temperature")
    b.plain(".")
    b.edge(m_verb, m_reagent, "acts-on")
    b.edge(m_verb, m_solvent, "using")
    b.edge(m_reagent, m_amount, "measure")
    b.edge(m_solvent, m_volume, "measure")
    b.edge(m_verb, m_stir, "succ")
    b.edge(m_stir, m_time, "setting")
    b.edge(m_stir, m_temp, "setting")

    _add_slot(slots, "reagent", reagent)
    _add_slot(slots, "solvent", solvent)
    _add_slot(slots, "reaction_time", f"{hours} {time_u}")
    _add_slot(slots, "temperature", f"{temp} °C")
    return b.build()


def _build_add(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    reagent = rng.choice(v.reagents)
    target = rng.choice(("mixture", "solution", "residue"))
    hours = str(1 + rng.below(24))
    time_u = rng.choice(v.time_units)

    b = _SentenceBuilder()
    m_add = b.mention("Add", "Action")
    m_reagent = b.mention(reagent, "Reagent")
    b.plain("to", "the", target, "and")
    m_stir = b.mention("stir", "Action")
    b.plain("for")
    m_time = b.mention([hours, time_u], "Time")
    b.plain(".")
    b.edge(m_add, m_reagent, "acts-on")
    b.edge(m_add, m_stir, "succ")
    b.edge(m_stir, m_time, "setting")

    _add_slot(slots, "reagent", reagent)
    _add_slot(slots, "reaction_time", f"{hours} {time_u}")
    return b.build()


def _build_dilute(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    sample = rng.choice(v.samples)
    diluent = rng.choice(v.diluents)

    b = _SentenceBuilder()
    m_sample = b.mention(sample, "Reagent")
    b.plain("was")
    m_dilute = b.mention("diluted", "Action")
    b.plain("using")
    m_diluent = b.mention(diluent, "Reagent")
    b.plain(".")
    b.edge(m_dilute, m_sample, "acts-on")
    b.edge(m_dilute, m_diluent, "using")

    _add_slot(slots, "reagent", diluent)
    _add_slot(slots, "starting_material", sample)
    return b.build()


def _build_titrate(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    ph = f"{2 + rng.below(11)}.{rng.below(10)}"
    titrant = rng.choice(v.titrants)

    b = _SentenceBuilder()
    b.plain("The", "mixture", "was")
    m_titrate = b.mention("titrated", "Action")
    b.plain("to")
    m_ph = b.mention(["pH", ph], "pH")
    b.plain("using")
    m_titrant = b.mention(titrant, "Reagent")
    b.plain(".")
    b.edge(m_titrate, m_ph, "setting")
    b.edge(m_titrate, m_titrant, "using")

    _add_slot(slots, "other_compound", titrant)
    return b.build()


def _build_filter(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    liquid = rng.choice(("solution", "suspension"))
    equipment = rng.choice(v.equipment)
    pore = rng.choice(v.pore_sizes)

    b = _SentenceBuilder()
    b.plain("The", liquid, "was")
    m_filter = b.mention("filtered", "Action")
    b.plain("through", "a")
    m_equipment = b.mention(equipment, "Equipment")
    b.plain("(")
    m_pore = b.mention([pore, "µm"], "Generic-Measure")
    b.plain(")", ".")
    b.edge(m_filter, m_equipment, "using")
    b.edge(m_equipment, m_pore, "measure")
    return b.build()


def _build_yield(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    product = rng.choice(v.products)
    pct = str(30 + rng.below(66))
    mass = str(50 + rng.below(900))
    unit_m = rng.choice(v.units_mass)

    b = _SentenceBuilder()
    b.plain("The", "residue", "was")
    m_purify = b.mention("purified", "Action")
    b.plain("by", "column", "chromatography", "to")
    m_afford = b.mention("afford", "Action")
    m_product = b.mention(product, "Reagent")
    b.plain("(")
    m_pct = b.mention([pct, "%"], "Yield")
    b.plain(",")
    m_mass = b.mention([mass, unit_m], "Yield")
    b.plain(")", ".")
    b.edge(m_purify, m_afford, "succ")
    b.edge(m_afford, m_product, "creates")
    b.edge(m_product, m_pct, "measure")
    b.edge(m_product, m_mass, "measure")

    _add_slot(slots, "product", product)
    _add_slot(slots, "yield_percent", pct)
    _add_slot(slots, "yield_other", f"{mass} {unit_m}")
    return b.build()


def _build_heat(rng: SplitMix64, v: Vocab, slots: dict) -> SentenceGraph:
    temp = str(5 * rng.below(25))
    hours = str(1 + rng.below(48))
    time_u = rng.choice(v.time_units)

    b = _SentenceBuilder()
    m_heat = b.mention("Heat", "Action")
    b.plain("the", "reaction", "mixture", "to")
    m_temp = b.mention([temp, "°C"], "Temperature")
    b.plain("for")
    m_time = b.mention([hours, time_u], "Time")
    b.plain(".")
    b.edge(m_heat, m_temp, "setting")
    b.edge(m_heat, m_time, "setting")

    _add_slot(slots, "temperature", f"{temp} °C")
    _add_slot(slots, "reaction_time", f"{hours} {time_u}")
    return b.build()


_BUILDERS = {
    "dissolve": _build_dissolve,
    "add": _build_add,
    "dilute": _build_dilute,
    "titrate": _build_titrate,
    "filter": _build_filter,
    "yield": _build_yield,
    "heat": _build_heat,
}


def _weighted_name(rng: SplitMix64, templates: tuple[tuple[str, int], ...]) -> str:
    total = sum(w for _, w in templates)
    pick = rng.below(total)
    for name, weight in templates:
        pick -= weight
        if pick < 0:
            return name
    raise AssertionError("unreachable")


def generate_fixtures(spec: FixtureSpec) -> list[ProcedureDoc]:
    """Generate ``spec.n_procedures`` documents, 2-6 sentences each.

    Sentences come from the weighted templates; protocol slots accumulate
    from the instantiated values (first occurrence wins, no duplicates).
    """
    rng = SplitMix64(spec.seed)
    docs = []
    for i in range(spec.n_procedures):
        source_pick = rng.below(10)
        source = "US" if source_pick < 6 else "EP" if source_pick < 9 else "OTHER"
        patent_id = f"{source}-{rng.below(100_000_000):08d}"
        slots: dict[str, list[str]] = {}
        sentences = []
        for _ in range(2 + rng.below(5)):
            name = _weighted_name(rng, spec.templates)
            sentences.append(_BUILDERS[name](rng, spec.vocab, slots))
        _add_slot(slots, "example_label", f"Example {1 + rng.below(400)}")
        docs.append(
            ProcedureDoc(
                id=f"{patent_id}-{i:06d}",
                source=source,
                patent_id=patent_id,
                sentences=tuple(sentences),
                slots=slots,
            )
        )
    return docs

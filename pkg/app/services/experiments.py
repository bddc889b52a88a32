# services/experiments.py
import bisect
import concurrent.futures
import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from app import config
from app.data.generators import random_monomial_ideal, random_problem, truncation_partner
from app.models.core import (
    NEG_INF,
    InputError,
    MldResult,
    PreconditionError,
    RIdeal,
    format_rat,
    sum_with_power_of_max_ideal,
    to_rat,
)
from app.models.jets import sufficient_jet_level
from app.models.toric import SearchConfig, ToricProblem, check_family, mld_monomial, summarize_boundedness

logger = logging.getLogger("services.experiments")


class ExperimentKind(str, Enum):
    BOUNDEDNESS = "BOUNDEDNESS"
    ACC = "ACC"
    IDEAL_ADIC = "IDEAL_ADIC"


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ExperimentKind
    n: int = 2
    exponents: Tuple[Fraction, ...] = (Fraction(1),)
    sample_count: int = 20
    seed: int = 0
    max_degree: int = 4
    max_factors: int = 1
    truncation_levels: Tuple[int, ...] = ()
    family: Optional[Tuple[ToricProblem, ...]] = None
    alarm_length: Optional[int] = None
    bound: Optional[int] = None
    jet_level_limit: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ExperimentKind(self.kind))
        object.__setattr__(self, "exponents", tuple(sorted({to_rat(e) for e in self.exponents})))
        object.__setattr__(self, "truncation_levels", tuple(sorted(set(self.truncation_levels))))
        if self.sample_count < 1:
            raise InputError(f"sample_count must be at least 1, got {self.sample_count}")
        if self.n < 1 or self.max_degree < 1 or self.max_factors < 1:
            raise InputError("n, max_degree and max_factors must be positive")
        if not self.exponents or any(e < 0 for e in self.exponents):
            raise InputError("the exponent set must be a nonempty set of nonnegative rationals")
        if any(s < 1 for s in self.truncation_levels):
            raise InputError("truncation levels must be positive")
        if self.kind == ExperimentKind.IDEAL_ADIC and not self.truncation_levels:
            raise InputError("IDEAL_ADIC needs at least one truncation level")
        if self.family is not None:
            object.__setattr__(self, "family", tuple(self.family))
            check_family(list(self.family))

    @property
    def search(self) -> SearchConfig:
        return SearchConfig(oracle_bound=self.bound)


# ==============================
# AVALIAÇÃO
# ==============================

def _mld_job(job: Tuple[ToricProblem, SearchConfig]) -> MldResult:
    problem, cfg = job
    return mld_monomial(problem, cfg)


def evaluate_all(problems: Sequence[ToricProblem], cfg: SearchConfig,
                 workers: Optional[int] = None) -> List[MldResult]:
    """mld de cada problema, na ordem de entrada qualquer que seja o número de processos."""
    workers = config.WORKERS if workers is None else workers
    jobs = [(p, cfg) for p in problems]
    if workers <= 1 or len(jobs) <= 1:
        return [_mld_job(job) for job in jobs]
    logger.debug(f"🔄 avaliando {len(jobs)} instâncias em {workers} processos")
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_mld_job, jobs))


def _sample(spec: ExperimentSpec, rng: random.Random) -> List[ToricProblem]:
    return [random_problem(rng, spec.n, spec.exponents, spec.max_degree, spec.max_factors)
            for _ in range(spec.sample_count)]


def longest_increasing_run(values: Sequence[Fraction]) -> int:
    """Comprimento da maior subsequência estritamente crescente."""
    tails: List[Fraction] = []
    for x in values:
        i = bisect.bisect_left(tails, x)
        if i == len(tails):
            tails.append(x)
        else:
            tails[i] = x
    return len(tails)


# ==============================
# LIMITAÇÃO
# ==============================

def _histogram(instances: List[Dict[str, Any]]) -> List[Dict[str, int]]:
    rows = [i for i in instances if i["value"] != str(NEG_INF)]
    if not rows:
        return []
    df = pd.DataFrame(rows, columns=["k", "ord_m"])
    table = df.groupby(["k", "ord_m"]).size().reset_index(name="count")
    return [{"k": int(r.k), "ord_m": int(r.ord_m), "count": int(r.count)} for r in table.itertuples(index=False)]


def _jet_level(problem: ToricProblem, limit: int) -> Optional[int]:
    if len(problem.a.factors) != 1:
        return None
    ideal, exp = problem.a.factors[0]
    if exp <= 0 or ideal.is_unit:
        return None
    return sufficient_jet_level(ideal, exp, limit)


def _boundedness(spec: ExperimentSpec, workers: Optional[int]) -> Dict[str, Any]:
    family = list(spec.family) if spec.family is not None else _sample(spec, random.Random(spec.seed))
    results = evaluate_all(family, spec.search, workers)
    report = summarize_boundedness(family, results)
    report["histogram"] = _histogram(report["instances"])
    if spec.jet_level_limit is not None:
        for row, problem in zip(report["instances"], family):
            row["jet_level"] = _jet_level(problem, spec.jet_level_limit)
    return report


# ==============================
# ACC
# ==============================

def _acc(spec: ExperimentSpec, workers: Optional[int]) -> Dict[str, Any]:
    problems = _sample(spec, random.Random(spec.seed))
    results = evaluate_all(problems, spec.search, workers)
    finite = [r.value.value for r in results if r.value.is_finite]
    run = longest_increasing_run(finite)
    alarm_length = spec.alarm_length if spec.alarm_length is not None else config.ACC_ALARM
    if run > alarm_length:
        logger.warning(f"⚠️ sequência estritamente crescente de {run} valores de mld passa de {alarm_length}")
    return {
        "values": [format_rat(v) for v in sorted(finite)],
        "distinct_values": [format_rat(v) for v in sorted(set(finite))],
        "not_log_canonical": sum(1 for r in results if r.value == NEG_INF),
        "longest_increasing_run": run,
        "alarm_length": alarm_length,
        "alarm": run > alarm_length,
        "uncertified": any(not r.certified for r in results),
    }


# ==============================
# IDEAL-ADIC
# ==============================

def agree_modulo(a: RIdeal, b: RIdeal, s: int) -> bool:
    """a_j + m^s = b_j + m^s fator a fator, com expoentes idênticos."""
    if a.exponents() != b.exponents():
        return False
    return all(sum_with_power_of_max_ideal(I, s) == sum_with_power_of_max_ideal(J, s)
               for I, J in zip(a.ideals(), b.ideals()))


def compare_truncations(a: RIdeal, b: RIdeal, s: int, cfg: Optional[SearchConfig] = None) -> Dict[str, Any]:
    """mld de a e de b, que precisam coincidir módulo m^s."""
    if not agree_modulo(a, b, s):
        raise PreconditionError(f"{a} and {b} do not agree modulo m^{s}")
    mld_a = mld_monomial(ToricProblem(a.n, a), cfg)
    mld_b = mld_monomial(ToricProblem(b.n, b), cfg)
    return {
        "s": s,
        "a": str(a),
        "b": str(b),
        "mld_a": str(mld_a.value),
        "mld_b": str(mld_b.value),
        "equal": mld_a.value == mld_b.value,
        "certified": mld_a.certified and mld_b.certified,
    }


def _ideal_adic(spec: ExperimentSpec, workers: Optional[int]) -> Dict[str, Any]:
    rng = random.Random(spec.seed)
    pairs = []
    for _ in range(spec.sample_count):
        I = random_monomial_ideal(rng, spec.n, spec.max_degree)
        exp = rng.choice(spec.exponents)
        a = RIdeal(((I, exp),))
        for s in spec.truncation_levels:
            b = RIdeal(((truncation_partner(rng, I, s), exp),))
            pairs.append((s, a, b))

    problems = []
    for _, a, b in pairs:
        problems.extend([ToricProblem(spec.n, a), ToricProblem(spec.n, b)])
    results = evaluate_all(problems, spec.search, workers)

    levels = []
    for s in spec.truncation_levels:
        rows = [(results[2 * i], results[2 * i + 1]) for i, pair in enumerate(pairs) if pair[0] == s]
        agree = sum(1 for ra, rb in rows if ra.value == rb.value)
        levels.append({"s": s, "samples": len(rows), "agree": agree})

    stable = None
    for row in reversed(levels):
        if row["agree"] != row["samples"]:
            break
        stable = row["s"]
    if stable is None:
        logger.info(f"🔄 nenhum nível de truncamento testado fez os mlds coincidirem nas {spec.sample_count} amostras")
    return {
        "levels": levels,
        "stable_level": stable,
        "uncertified": any(not r.certified for r in results),
    }


# ==============================
# PONTO DE ENTRADA
# ==============================

_RUNNERS = {
    ExperimentKind.BOUNDEDNESS: _boundedness,
    ExperimentKind.ACC: _acc,
    ExperimentKind.IDEAL_ADIC: _ideal_adic,
}


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> Dict[str, Any]:
    logger.info(f"🔄 experimento {spec.kind.value}, semente {spec.seed}, {spec.sample_count} amostras")
    report = _RUNNERS[spec.kind](spec, workers)
    report.update({"kind": spec.kind.value, "seed": spec.seed})
    # uma família explícita informa a própria dimensão e expoentes
    report.setdefault("n", spec.n)
    report.setdefault("exponents", [format_rat(e) for e in spec.exponents])
    if report["uncertified"]:
        logger.warning(f"⚠️ relatório {spec.kind.value} contém valores não certificados")
    return report

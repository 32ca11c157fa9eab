"""
Pipelines from a seed group Q to pairs A -> G with A-hat isomorphic to its closure

    theorem_main_pipeline      check Q's hypotheses, run the Rips construction, emit (Gamma, N)
    goldstein_guralnick_pair   G = Gamma x B, A = N x 1
    fibre_product_generators   P = (N x 1) . diagonal, inside Gamma x Gamma
    finitely_presented_pair    A = P x 1 inside (Gamma x Gamma) x Gamma
    nikolov_segal_subgroup     <N, gamma> = N x|_alpha Z
    gn_family                  G_n = Gamma_n x <t>, with a three-valued direct-factor verdict

Every statement in a report is a Certificate. Only machine checks made here are
"certified"; facts about profinite completions are never more than theorem-cited.

Example:
    >>> from constructions import higman, theorem_main_pipeline
    >>> report = theorem_main_pipeline(higman(), 3)
    >>> report.status
    'ok'
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, field_validator

from config import get_settings
from coset_enum import (
    Certificate, EnumerationLimits, ResourceExhausted, Status, certify_no_finite_quotients, todd_coxeter,
)
from homology import h1, relation_matrix
from presentations import (
    MarkedSubgroup, Presentation, direct_product, factor_generators, format_presentation,
    is_trivial_presentation, parse_presentation, tietze_simplify,
)
from rips import RipsOutput, RipsParameters, project, rips_wise
from small_cancellation import dehn_reduce, sc_verify
from words import AlphabetMismatchError, Word, format_word

logger = logging.getLogger(__name__)

HIGMAN_CORRECTED = '< a, b, c, d | a*b*a^-1 = b^2, b*c*b^-1 = c^2, c*d*c^-1 = d^2, d*a*d^-1 = a^2 >'
# the fourth relation as it is often misprinted
HIGMAN_PRINTED = '< a, b, c, d | a*b*a^-1 = b^2, b*c*b^-1 = c^2, c*d*c^-1 = d^2, d*a*d^-1 = d^2 >'
HIGMAN_VARIANTS = {'corrected': HIGMAN_CORRECTED, 'printed': HIGMAN_PRINTED}

DirectFactor = Literal['yes', 'no', 'unknown']
PROFINITE_STATUSES = (Status.THEOREM_CITED, Status.ASSERTED)


class HypothesisRefuted(RuntimeError):
    """A hypothesis on Q was checked and found false."""

    def __init__(self, hypothesis: str, certificate: Certificate, checked: Sequence[Certificate] = ()):
        super().__init__(f"hypothesis refuted: {hypothesis}")
        self.hypothesis = hypothesis
        self.certificate = certificate
        self.checked = list(checked)


class PreconditionRefuted(ValueError):
    """An input violates a checkable precondition of a construction."""

    def __init__(self, message: str, certificate: Certificate):
        super().__init__(message)
        self.certificate = certificate


class PairReport(BaseModel):
    """A pair of groups A -> G with the status of every claim made about it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    construction: str
    g: Presentation
    a: MarkedSubgroup
    b: Optional[MarkedSubgroup] = None
    certificates: list[Certificate]
    profinite_claims: list[Certificate] = []
    direct_factor: Optional[DirectFactor] = None
    notes: list[str] = []

    @field_validator('profinite_claims')
    @classmethod
    def never_certified(cls, claims: list[Certificate]) -> list[Certificate]:
        for claim in claims:
            if claim.status not in PROFINITE_STATUSES:
                raise ValueError(f"Profinite claim cannot have status {claim.status.value}: {claim.claim}")
        return claims

    @property
    def status(self) -> str:
        statuses = {claim.status for claim in self.certificates}
        if Status.REFUTED in statuses:
            return 'refuted'
        if Status.UNKNOWN in statuses:
            return 'unknown'
        return 'ok'

    def to_dict(self) -> dict[str, Any]:
        return {
            'status': self.status,
            'construction': self.construction,
            'g': self.g.to_record().model_dump(),
            'a': self.a.to_record().model_dump(),
            'b': self.b.to_record().model_dump() if self.b is not None else None,
            'certificates': [claim.model_dump(mode='json') for claim in self.certificates],
            'profinite_claims': [claim.model_dump(mode='json') for claim in self.profinite_claims],
            'direct_factor': self.direct_factor,
            'notes': list(self.notes),
        }


@dataclass(frozen=True)
class SeedSequence:
    """A total, deterministic sequence n -> Q_n of candidate seed groups."""

    provider: Callable[[int], Presentation]
    description: str
    nontriviality_oracle: Optional[Callable[[int], Optional[Certificate]]] = None


def higman(variant: str = 'corrected') -> Presentation:
    """Higman's four-generator group; 'printed' uses d*a*d^-1 = d^2 as the last relation."""
    try:
        text = HIGMAN_VARIANTS[variant]
    except KeyError:
        raise ValueError(f"Unknown Higman variant: {variant} (expected one of {', '.join(HIGMAN_VARIANTS)})") from None
    return parse_presentation(text)


def higman_diagnostic() -> list[dict[str, Any]]:
    """Abelianization and Tietze simplification of both Higman variants."""
    rows = []
    for variant in HIGMAN_VARIANTS:
        q = higman(variant)
        rows.append({
            'variant': variant,
            'presentation': format_presentation(q),
            'relation_matrix': relation_matrix(q).entries,
            'h1': str(h1(q)),
            'simplified': format_presentation(tietze_simplify(q)),
        })
    rows[1]['note'] = ('the last relation reduces to a = d^2; then e = d^2 satisfies c*e*c^-1 = e^2, '
                       'so b, c, e obey the three-generator Higman relations and the group is trivial')
    return rows


# --- Q's hypotheses -----------------------------------------------------------

def _h1_certificate(q: Presentation, digest: str) -> Certificate:
    started = time.monotonic()
    factors = h1(q)
    runtime = int((time.monotonic() - started) * 1000)
    if factors.is_trivial():
        return Certificate(claim='H1(Q) = 0', status=Status.CERTIFIED, strategy='smith-normal-form',
                           runtime_ms=runtime, input_digest=digest, evidence={'h1': str(factors)})
    return Certificate(claim='H1(Q) = 0', status=Status.REFUTED, strategy='smith-normal-form',
                       runtime_ms=runtime, input_digest=digest,
                       evidence={'witness': {'h1': str(factors), 'invariant_factors': factors.model_dump()}})


def _h2_certificate(digest: str, flag: str) -> Certificate:
    return Certificate(claim='H2(Q) = 0', status=Status.ASSERTED, input_digest=digest, evidence={'flag': flag})


def _infinite_probe(q: Presentation, digest: str, probe_cosets: Optional[int]) -> Certificate:
    """Q infinite is asserted unless an enumeration over the trivial subgroup closes."""
    settings = get_settings()
    limits = EnumerationLimits(max_cosets=probe_cosets or settings.probe_cosets, max_time=settings.max_seconds)
    started = time.monotonic()
    try:
        table = todd_coxeter(q, (), limits)
    except ResourceExhausted as exc:
        return Certificate(claim='Q is infinite', status=Status.ASSERTED, bound=limits.max_cosets,
                           strategy='probe', runtime_ms=int((time.monotonic() - started) * 1000),
                           input_digest=digest,
                           evidence={'probe': f"enumeration over the trivial subgroup did not close "
                                              f"within {limits.max_cosets} cosets", 'reason': str(exc)})
    return Certificate(claim='Q is infinite', status=Status.REFUTED, bound=limits.max_cosets, strategy='probe',
                       runtime_ms=int((time.monotonic() - started) * 1000), input_digest=digest,
                       evidence={'witness': table.to_record().model_dump(mode='json'), 'order': table.index})


def _check_seed(q: Presentation, bound: int, limits: Optional[EnumerationLimits]) -> list[Certificate]:
    digest = q.digest()
    first = _h1_certificate(q, digest)
    quotients = certify_no_finite_quotients(q, bound, limits)
    # an explicit finite quotient takes precedence over a nonzero H1
    if quotients.status == Status.REFUTED:
        raise HypothesisRefuted('no-finite-quotients', quotients, [first])
    if first.status == Status.REFUTED:
        raise HypothesisRefuted('H1', first, [quotients])
    return [first, quotients]


def _certified(out: RipsOutput) -> list[Certificate]:
    return [claim for claim in out.metadata if claim.status == Status.CERTIFIED]


def _nu_words(out: RipsOutput) -> list[Word]:
    return [Word.generator(name) for name in out.nu]


def theorem_main_pipeline(q: Presentation, bound: int, rips_params: Optional[RipsParameters] = None, *,
                          limits: Optional[EnumerationLimits] = None, probe_cosets: Optional[int] = None,
                          h2_flag: str = 'caller-asserted') -> PairReport:
    """Check Q, build Gamma and N, and report N-hat -> Gamma-hat."""
    digest = q.digest()
    certificates = _check_seed(q, bound, limits)
    certificates.append(_h2_certificate(digest, h2_flag))
    infinite = _infinite_probe(q, digest, probe_cosets)
    if infinite.status == Status.REFUTED:
        raise HypothesisRefuted('Q-infinite', infinite)
    certificates.append(infinite)

    out = rips_wise(q, rips_params)
    certificates.extend(out.metadata)
    profinite = [
        Certificate(claim='the inclusion N -> Gamma induces an isomorphism of profinite completions',
                    status=Status.THEOREM_CITED, bound=bound, input_digest=digest,
                    evidence={'citation': 'a finitely generated normal subgroup whose quotient is super-perfect '
                                          'with no finite quotients has the same profinite completion',
                              'conditional_on': ['H1(Q) = 0', 'H2(Q) = 0', quotient_claim(bound)]}),
    ]
    cited_n = [
        Certificate(claim='N is not finitely presentable', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'a finitely presented normal subgroup of infinite index in a group of '
                                          'cohomological dimension 2 is free (Bieri)',
                              'conditional_on': ['Q is infinite']}),
    ]
    n = MarkedSubgroup(out.gamma, _nu_words(out), label='N', claims=cited_n)
    logger.info("pipeline: Gamma with %d generators and %d relators", len(out.gamma.generators),
                len(out.gamma.relators))
    return PairReport(construction='theorem-main', g=out.gamma, a=n, certificates=certificates,
                      profinite_claims=profinite)


def quotient_claim(bound: int) -> str:
    return f"no non-trivial finite quotient of order <= {bound}"


# --- pairs -----------------------------------------------------------------------

def goldstein_guralnick_pair(q: Presentation, b: Presentation, bound: int,
                             rips_params: Optional[RipsParameters] = None, **pipeline_options) -> PairReport:
    """G = Gamma x B with A = N x 1."""
    main = theorem_main_pipeline(q, bound, rips_params, **pipeline_options)
    out = rips_wise(q, rips_params)
    digest = q.digest()
    g = direct_product(out.gamma, b)
    b_names = factor_generators(g, 2)
    a = MarkedSubgroup(g, _nu_words(out), label='A = N x 1')
    b_marked = MarkedSubgroup(g, [Word.generator(name) for name in b_names], label='B')
    certificates = list(main.certificates)
    certificates.append(Certificate(
        claim='G = Gamma x B has |Gamma gens| + |B gens| generators', status=Status.CERTIFIED, strategy='count',
        input_digest=digest, evidence={'generators': len(g.generators), 'relators': len(g.relators)}))
    certificates.append(Certificate(claim='B is finitely presented and residually finite', status=Status.ASSERTED,
                                    input_digest=b.digest(), evidence={'flag': 'caller-asserted'}))
    certificates.append(Certificate(
        claim='A is not a direct factor of G or of any finite-index subgroup of G', status=Status.THEOREM_CITED,
        input_digest=digest,
        evidence={'citation': 'such direct factors are finitely presentable, while N is not',
                  'conditional_on': ['Q is infinite']}))
    profinite = list(main.profinite_claims) + [
        Certificate(claim='G-hat = Gamma-hat x B-hat = closure(A) x B-hat', status=Status.THEOREM_CITED,
                    bound=bound, input_digest=digest,
                    evidence={'citation': 'profinite completion commutes with finite direct products',
                              'depends_on': 'the inclusion N -> Gamma induces an isomorphism of '
                                            'profinite completions'}),
        Certificate(claim='A -> G induces an isomorphism A-hat -> closure(A)', status=Status.THEOREM_CITED,
                    bound=bound, input_digest=digest, evidence={'depends_on': 'N-hat = Gamma-hat'}),
    ]
    return PairReport(construction='goldstein-guralnick', g=g, a=a, b=b_marked, certificates=certificates,
                      profinite_claims=profinite)


def _diagonal_names(product: Presentation, gamma: Presentation) -> dict[str, str]:
    """Gamma generator -> its name in the second factor of product."""
    return dict(zip(gamma.generators, factor_generators(product, 2)))


def fibre_product_generators(rips_out: RipsOutput) -> MarkedSubgroup:
    """P = {(g1, g2) : pi(g1) = pi(g2)} inside Gamma x Gamma, generated by N x 1 and the diagonal."""
    gamma = rips_out.gamma
    product = direct_product(gamma, gamma)
    second = _diagonal_names(product, gamma)
    words = [Word.generator(name) for name in rips_out.nu]
    words.extend(Word.generator(name) * Word.generator(second[name]) for name in gamma.generators)
    digest = rips_out.q_input.digest()
    claims = [
        Certificate(claim='Q has a K(Q,1) with finite 3-skeleton', status=Status.ASSERTED, input_digest=digest,
                    evidence={'flag': 'caller-asserted'}),
        Certificate(claim='P is finitely presented', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'the 1-2-3 theorem for fibre products',
                              'conditional_on': ['Q has a K(Q,1) with finite 3-skeleton']}),
        Certificate(claim='P -> Gamma x Gamma induces an isomorphism of profinite completions',
                    status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'fibre products over a group with no finite quotients and trivial H2'}),
        Certificate(claim='no finite-index subgroup of P splits as a non-trivial direct product',
                    status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'centralizers in torsion-free hyperbolic groups are cyclic'}),
    ]
    return MarkedSubgroup(product, words, label='P', claims=claims)


def is_balanced(rips_out: RipsOutput, product: Presentation, w: Word) -> bool:
    """True when the two coordinates of w in Gamma x Gamma have the same image in Q."""
    stray = w.symbols() - set(product.generators)
    if stray:
        raise AlphabetMismatchError(f"Word uses symbols outside the product: {', '.join(sorted(stray))}")
    first = set(factor_generators(product, 1))
    back = {new: old for old, new in _diagonal_names(product, rips_out.gamma).items()}
    left = Word([letter for letter in w if letter[0] in first])
    right = Word([(back[name], sign) for name, sign in w if name in back])
    return project(rips_out, left) == project(rips_out, right)


def finitely_presented_pair(rips_out: RipsOutput) -> PairReport:
    """A = P x 1 inside (Gamma x Gamma) x Gamma; both groups finitely presented, A not normal."""
    p = fibre_product_generators(rips_out)
    g = direct_product(p.ambient, rips_out.gamma)
    digest = rips_out.q_input.digest()
    a = MarkedSubgroup(g, p.subgroup_generators, label='A = P x 1', claims=p.claims)
    third = [Word.generator(name) for name in factor_generators(g, 2)]
    b = MarkedSubgroup(g, third, label='1 x Gamma')
    certificates = _certified(rips_out) + [
        Certificate(claim='G = (Gamma x Gamma) x Gamma', status=Status.CERTIFIED, strategy='count',
                    input_digest=digest, evidence={'generators': len(g.generators), 'relators': len(g.relators)}),
        Certificate(claim='A is finitely presented', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'depends_on': 'P is finitely presented'}),
        Certificate(claim='A is not normal in G', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'the diagonal is not normal in Gamma x Gamma for non-abelian Gamma'}),
        Certificate(claim='A is not a direct factor of any finite-index subgroup of G', status=Status.THEOREM_CITED,
                    input_digest=digest,
                    evidence={'depends_on': 'no finite-index subgroup of P splits as a non-trivial direct product'}),
    ]
    profinite = [
        Certificate(claim='A-hat -> closure(A) is an isomorphism and closure(A) is a direct factor of G-hat',
                    status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'depends_on': 'P -> Gamma x Gamma induces an isomorphism of profinite completions'}),
    ]
    return PairReport(construction='finitely-presented', g=g, a=a, b=b, certificates=certificates,
                      profinite_claims=profinite)


# --- Nikolov-Segal type subgroups ---------------------------------------------------

def _nontriviality(q: Presentation, image: Word, digest: str, use_oracle: bool) -> Certificate:
    claim = f"pi(gamma) = {format_word(image)} is non-trivial in Q"
    if not q.relators:
        return Certificate(claim=claim, status=Status.CERTIFIED, strategy='free-reduction', input_digest=digest,
                           evidence={'reduced': format_word(image)})
    if use_oracle:
        report = sc_verify(q)
        if report.passes_sixth:
            reduced = dehn_reduce(image, q, report)
            if reduced.is_identity():
                return Certificate(claim=claim, status=Status.REFUTED, strategy='dehn', input_digest=digest,
                                   evidence={'witness': {'pi_image': format_word(image), 'dehn_reduced': '1'}})
            return Certificate(claim=claim, status=Status.CERTIFIED, strategy='dehn', input_digest=digest,
                               evidence={'dehn_reduced': format_word(reduced)})
    return Certificate(claim=claim, status=Status.ASSERTED, input_digest=digest,
                       evidence={'flag': 'no word-problem oracle for Q'})


def nikolov_segal_subgroup(rips_out: RipsOutput, gamma_word: Word, use_oracle: bool = True) -> MarkedSubgroup:
    """<N, gamma> = N x| <gamma> for gamma outside N."""
    stray = gamma_word.symbols() - set(rips_out.gamma.generators)
    if stray:
        raise AlphabetMismatchError(f"Word uses symbols outside Gamma: {', '.join(sorted(stray))}")
    digest = rips_out.q_input.digest()
    image = project(rips_out, gamma_word)
    if image.is_identity():
        certificate = Certificate(claim='pi(gamma) is non-trivial in Q', status=Status.REFUTED,
                                  strategy='substitution', input_digest=digest,
                                  evidence={'witness': {'word': format_word(gamma_word), 'pi_image': '1'}})
        raise PreconditionRefuted(f"{format_word(gamma_word)} lies in N: its image in Q is trivial", certificate)
    nontrivial = _nontriviality(rips_out.q_input, image, digest, use_oracle)
    if nontrivial.status == Status.REFUTED:
        raise PreconditionRefuted(f"{format_word(gamma_word)} lies in N: Dehn's algorithm reduces its image to 1",
                                  nontrivial)
    claims = [
        nontrivial,
        Certificate(claim='Q is torsion-free', status=Status.ASSERTED, input_digest=digest,
                    evidence={'flag': 'caller-asserted'}),
        Certificate(claim='Gamma is torsion-free and hyperbolic', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'depends_on': "Gamma satisfies C'(1/6)"}),
        Certificate(claim='<N, gamma> = N x|_alpha Z', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'depends_on': ['pi(gamma) has infinite order in Q', 'N is normal in Gamma']}),
        Certificate(claim='no power of alpha is inner, yet alpha is inner on N/I for every characteristic '
                          'finite-index subgroup I', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'non-cyclic subgroups of torsion-free hyperbolic groups have trivial '
                                          'centralizers; Q has no finite quotients'}),
        Certificate(claim='words gamma with images of infinite order in Q give pairwise profinitely '
                          'isomorphic subgroups <N, gamma>, not all isomorphic', status=Status.THEOREM_CITED,
                    input_digest=digest,
                    evidence={'depends_on': 'N-hat = Gamma-hat', 'vary': 'gamma'}),
    ]
    words = [Word.generator(name) for name in rips_out.nu] + [gamma_word]
    return MarkedSubgroup(rips_out.gamma, words, label=f"N x| <{format_word(gamma_word)}>", claims=claims)


# --- the recognition family -------------------------------------------------------

def _higman_oracle(n: int) -> Certificate:
    return Certificate(claim='Q_n != 1', status=Status.THEOREM_CITED, input_digest=higman().digest(),
                       evidence={'citation': "Higman's group is infinite"})


SEEDS: dict[str, SeedSequence] = {
    'higman': SeedSequence(provider=lambda n: higman(), description="constant: Higman's group",
                           nontriviality_oracle=_higman_oracle),
    'trivial': SeedSequence(provider=lambda n: parse_presentation('< a | a >'), description='constant: < a | a >'),
}


def direct_factor_verdict(seed: SeedSequence, n: int, tietze_budget: Optional[int] = None) -> tuple[str, Certificate]:
    """yes if Q_n Tietze-trivializes within budget, no if the seed's oracle proves Q_n != 1, else unknown."""
    q = seed.provider(n)
    digest = q.digest()
    budget = get_settings().tietze_moves if tietze_budget is None else tietze_budget
    claim = f"A_{n} is a direct factor of G_{n}"
    simplified = tietze_simplify(q, max_moves=budget)
    if is_trivial_presentation(simplified):
        return 'yes', Certificate(claim=claim, status=Status.CERTIFIED, bound=budget, strategy='tietze',
                                  input_digest=digest,
                                  evidence={'reason': 'seed Tietze-trivializes', 'moves_budget': budget,
                                            'argument': 'Q_n = 1 gives N_n = Gamma_n, so A_n = Gamma_n x 1'})
    if seed.nontriviality_oracle is not None:
        oracle = seed.nontriviality_oracle(n)
        if oracle is not None and oracle.status in (Status.CERTIFIED, Status.THEOREM_CITED):
            return 'no', Certificate(claim=f"A_{n} is not a direct factor of G_{n}", status=oracle.status,
                                     bound=budget, strategy='oracle', input_digest=digest,
                                     evidence={'reason': 'Q_n != 1', 'oracle': oracle.model_dump(mode='json')})
    return 'unknown', Certificate(claim=claim, status=Status.UNKNOWN, bound=budget, strategy='tietze',
                                  input_digest=digest,
                                  evidence={'reason': 'no Tietze trivialization within budget and no '
                                                      'nontriviality certificate'})


def gn_family(seed: SeedSequence, n: int, bound: int, rips_params: Optional[RipsParameters] = None, *,
              tietze_budget: Optional[int] = None, limits: Optional[EnumerationLimits] = None) -> PairReport:
    """Member n of the family G_n = Gamma_n x <t> with A_n = <nu1, nu2, nu3> and B_n = <t>."""
    q = seed.provider(n)
    digest = q.digest()
    certificates = _check_seed(q, bound, limits)
    certificates.append(_h2_certificate(digest, 'seed-asserted'))
    out = rips_wise(q, rips_params)
    g = direct_product(out.gamma, Presentation(['t']))
    t = factor_generators(g, 2)[0]
    a = MarkedSubgroup(g, _nu_words(out), label=f"A_{n}")
    b = MarkedSubgroup(g, [Word.generator(t)], label=f"B_{n}")
    verdict, evidence = direct_factor_verdict(seed, n, tietze_budget)

    certificates.extend(_certified(out))
    certificates.extend([
        Certificate(claim=f"G_{n} = Gamma_{n} x <{t}>", status=Status.CERTIFIED, strategy='count',
                    input_digest=digest, evidence={'generators': len(g.generators), 'relators': len(g.relators)}),
        Certificate(claim=f"G_{n} is residually finite and torsion-free", status=Status.THEOREM_CITED,
                    input_digest=digest,
                    evidence={'depends_on': ['Gamma is residually finite', 'Gamma is torsion-free']}),
        Certificate(claim=f"B_{n} is infinite", status=Status.CERTIFIED, strategy='projection', input_digest=digest,
                    evidence={'argument': f"G_{n} maps onto <{t} | > = Z, sending {t} to a generator"}),
        Certificate(claim=f"the set of n with A_n a direct factor of G_n is not recursive",
                    status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'triviality of super-perfect groups without finite quotients is '
                                          'undecidable', 'seed': seed.description,
                              'scope': 'holds for the undecidable seed sequence, not for built-in seeds'}),
        Certificate(claim=f"if A_{n} is not a direct factor of G_{n}, it is not a direct factor of any "
                          f"finite-index subgroup", status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': 'direct factors of finitely presented groups are finitely presentable'}),
    ])
    certificates.append(evidence)
    profinite = [
        Certificate(claim=f"G_{n}-hat = closure(A_{n}) x closure(B_{n})", status=Status.THEOREM_CITED,
                    input_digest=digest, evidence={'depends_on': 'N-hat = Gamma-hat'}),
        Certificate(claim=f"A_{n} -> G_{n} induces an isomorphism A_{n}-hat -> closure(A_{n})",
                    status=Status.THEOREM_CITED, input_digest=digest, evidence={'depends_on': 'N-hat = Gamma-hat'}),
    ]
    notes = [
        'direct_factor is a semidecision: yes from a Tietze trivialization of Q_n, no from a nontriviality '
        'certificate, otherwise unknown',
        f"verdict evidence: {evidence.evidence.get('reason', '')}",
    ]
    return PairReport(construction='gn-family', g=g, a=a, b=b, certificates=certificates,
                      profinite_claims=profinite, direct_factor=verdict, notes=notes)


def hygiene_violations(reports: Iterable[dict[str, Any]]) -> list[str]:
    """Problems in serialized reports: certified profinite claims, certificates without a digest."""
    problems = []
    for report in reports:
        name = report.get('construction', '?')
        for claim in report.get('profinite_claims', []):
            if claim['status'] == Status.CERTIFIED.value:
                problems.append(f"{name}: certified profinite claim '{claim['claim']}'")
        for claim in report.get('certificates', []):
            if not claim.get('input_digest'):
                problems.append(f"{name}: certificate without input digest '{claim['claim']}'")
            if 'bound' not in claim or 'status' not in claim:
                problems.append(f"{name}: certificate without bound or status '{claim['claim']}'")
    return problems

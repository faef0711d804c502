#!/usr/bin/env python3
"""Algebra, certificate and obstruction records read from the database files.

The database is three pipe-separated text files (algebras.db,
certificates.db, obstructions.db). Each carries a '# sha256:' header over its
non-comment lines. Records are checked against their own structure equations
(step, center, d^2 = 0) when they are looked up, so one bad row does not stop
the rest of the census from loading.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from g2cert.config import DB_ENV, Settings
from g2cert.errors import (
    BadCertificate,
    BadSpec,
    ConsistencyError,
    DomainError,
    JacobiViolation,
    NotFound,
    ParseError,
    RegimeViolation,
    UnknownFamily,
)
from g2cert.exterior import basis_vector
from g2cert.g2 import G2Certificate
from g2cert.lie_ce import (
    NilpotentLieAlgebra,
    Subspace,
    build_algebra,
    center,
    nilpotency_step,
)
from g2cert.obstructions import (
    ContractionCertificate,
    IdealCertificate,
    Method,
    check_lambda_obstruction,
)
from g2cert.parsing import (
    Regime,
    parse_form,
    parse_regime,
    parse_structure,
    parse_vector,
)

logger = logging.getLogger(__name__)

# Package-relative first (wheel installs), then the repo checkout.
PACKAGE_DB_DIR = Path(__file__).parent / "database"
REPO_DB_DIR = Path(__file__).parent.parent / "references" / "database"

ALGEBRAS_FILE = "algebras.db"
CERTIFICATES_FILE = "certificates.db"
OBSTRUCTIONS_FILE = "obstructions.db"

PURE = "pure"
COCLOSED_ONLY_EXTERNAL = "coclosed-only-external"
NO_COCLOSED = "no-coclosed"
NO_COCLOSED_EXTERNAL = "no-coclosed-external"
STATUSES = (PURE, COCLOSED_ONLY_EXTERNAL, NO_COCLOSED, NO_COCLOSED_EXTERNAL)


def default_db_dir() -> Path:
    if (PACKAGE_DB_DIR / ALGEBRAS_FILE).exists():
        return PACKAGE_DB_DIR
    return REPO_DB_DIR


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraRecord:
    name: str
    step: int
    decomposable: bool
    structure: str
    center: tuple[int, ...]
    status: str
    method: Method | None = None
    param: str | None = None
    constraint: Regime | None = None
    sample_groups: tuple[tuple[Fraction, ...], ...] = ()
    member_of: str | None = None

    @property
    def is_family(self) -> bool:
        return self.param is not None

    @property
    def samples(self) -> tuple[Fraction, ...]:
        return tuple(v for group in self.sample_groups for v in group)

    @property
    def member_param(self) -> Fraction | None:
        if self.member_of is None or "(" not in self.name:
            return None
        return Fraction(self.name[self.name.index("(") + 1:-1])


@dataclass(frozen=True)
class CertificateRecord:
    algebra: str
    regime: Regime | None
    omega: str
    psi_minus: str
    eta: str
    X: str | None = None
    expect_psi_plus: str | None = None
    expect_metric: str | None = None
    cited: str | None = None

    def applies_to(self, value: Fraction | None) -> bool:
        if self.regime is None:
            return True
        return value is not None and self.regime.contains(value)

    def instantiate(self, n: int, param: Fraction | None = None) -> G2Certificate:
        if self.cited:
            raise BadCertificate(f"{self.label} has no checkable certificate: {self.cited}")
        try:
            return G2Certificate(
                algebra=self.algebra,
                omega=parse_form(self.omega, n, param),
                psi_minus=parse_form(self.psi_minus, n, param),
                eta=parse_form(self.eta, n, param),
                X=parse_vector(self.X, n) if self.X else None,
                param=param,
            )
        except ParseError as exc:
            raise BadCertificate(f"{self.label}: {exc}") from exc

    def expected_metric(self) -> list[list[Fraction]] | None:
        if not self.expect_metric:
            return None
        return [[Fraction(x) for x in row.split(",")] for row in self.expect_metric.split(";")]

    @property
    def label(self) -> str:
        return self.algebra if self.regime is None else f"{self.algebra}@{self.regime}"


@dataclass(frozen=True)
class ObstructionRecord:
    name: str
    method: Method
    fields: dict = field(default_factory=dict, hash=False)

    def certificate(self, g: NilpotentLieAlgebra, settings: Settings | None = None):
        """Build the obstruction certificate this record pins for g."""
        n = g.n
        f = self.fields
        try:
            if self.method is Method.CONTRACTION:
                U = [parse_form(u, n) for u in f["U"].split(",")]
                return ContractionCertificate(
                    X=parse_vector(f["X"], n),
                    Y=parse_vector(f["Y"], n),
                    U=Subspace.span(n, 2, U),
                )
            if self.method is Method.IDEAL:
                return IdealCertificate(a=parse_form(f["a"], n), b=parse_form(f["b"], n))
            X = parse_vector(f["X"], n)
            w = [parse_form(m, n - 1) for m in f["w"].split(",")]
            W = Subspace.span(n - 1, 5, [parse_form(m, n - 1) for m in f["W"].split(",")])
            return check_lambda_obstruction(g, X, w, W, settings)
        except (KeyError, ParseError) as exc:
            raise BadCertificate(f"obstruction record {self.name}: {exc}") from exc


# ---------------------------------------------------------------------------
# Parsing the .db files
# ---------------------------------------------------------------------------

def _read_db(path: Path, strict: bool = False) -> list[tuple[int, list[str]]]:
    """Non-comment rows of a .db file as (line number, fields).

    A missing or stale checksum header is a warning, or a ConsistencyError
    when strict.
    """
    text = path.read_text()
    lines = text.splitlines(keepends=True)
    body = "".join(line for line in lines if not line.startswith("#"))
    declared = next((line.split(":", 1)[1].strip() for line in lines if line.startswith("# sha256:")), None)
    problem = None
    if declared is None:
        problem = f"{path} has no checksum header"
    elif hashlib.sha256(body.encode()).hexdigest() != declared:
        problem = f"{path}: checksum mismatch; the file was edited without updating its header"
    if problem and strict:
        raise ConsistencyError(problem)
    if problem:
        logger.warning("%s", problem)
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#") or not line.strip():
            continue
        rows.append((lineno, [part.strip() for part in line.split("|")]))
    return rows


def _key_values(parts: list[str], where: str) -> dict[str, str]:
    out = {}
    for part in parts:
        if "=" not in part:
            raise ConsistencyError(f"{where}: expected key=value, got {part!r}")
        key, value = (s.strip() for s in part.split("=", 1))
        if key == "status" and ",method=" in value:
            value, method = value.split(",method=", 1)
            out["method"] = method.strip()
        out[key] = value
    return out


def _parse_samples(text: str) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(v) for v in group.split(",")) for group in text.split(";"))


def _algebra_record(lineno: int, parts: list[str]) -> AlgebraRecord:
    where = f"{ALGEBRAS_FILE}:{lineno}"
    name = parts[0]
    kv = _key_values(parts[1:], where)
    missing = {"step", "dec", "eq", "center", "status"} - kv.keys()
    if missing:
        raise ConsistencyError(f"{where}: {name} is missing {sorted(missing)}")
    if kv["status"] not in STATUSES:
        raise ConsistencyError(f"{where}: unknown status {kv['status']!r}")
    method = Method(kv["method"]) if "method" in kv else None
    if (kv["status"] == NO_COCLOSED) != (method is not None):
        raise ConsistencyError(f"{where}: {name} needs a method exactly when status is {NO_COCLOSED}")
    return AlgebraRecord(
        name=name,
        step=int(kv["step"]),
        decomposable=kv["dec"] == "1",
        structure=kv["eq"],
        center=tuple(int(i) for i in kv["center"].split(",")),
        status=kv["status"],
        method=method,
        param=kv.get("param"),
        constraint=parse_regime(kv["constraint"]) if "constraint" in kv else None,
        sample_groups=_parse_samples(kv["samples"]) if "samples" in kv else (),
        member_of=kv.get("member"),
    )


def _certificate_record(lineno: int, parts: list[str]) -> CertificateRecord:
    where = f"{CERTIFICATES_FILE}:{lineno}"
    key = parts[0]
    kv = _key_values(parts[1:], where)
    name, _, regime = key.partition("@")
    if "cited" in kv:
        if {"omega", "psi", "eta"} & kv.keys():
            raise ConsistencyError(f"{where}: {key} is cited and cannot carry omega, psi or eta")
        return CertificateRecord(
            algebra=name,
            regime=parse_regime(regime) if regime else None,
            omega="", psi_minus="", eta="",
            cited=kv["cited"],
        )
    if {"omega", "psi", "eta"} - kv.keys():
        raise ConsistencyError(f"{where}: {key} needs omega, psi and eta, or cited")
    return CertificateRecord(
        algebra=name,
        regime=parse_regime(regime) if regime else None,
        omega=kv["omega"],
        psi_minus=kv["psi"],
        eta=kv["eta"],
        X=kv.get("X"),
        expect_psi_plus=kv.get("expect_psiplus"),
        expect_metric=kv.get("expect_metric"),
    )


def _obstruction_record(lineno: int, parts: list[str]) -> ObstructionRecord:
    kv = {}
    for part in parts[1:]:
        k, _, v = part.partition("=")
        kv[k.strip()] = v.strip()
    if "method" not in kv:
        raise ConsistencyError(f"{OBSTRUCTIONS_FILE}:{lineno}: {parts[0]} has no method")
    method = Method(kv.pop("method"))
    return ObstructionRecord(name=parts[0], method=method, fields=kv)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

@dataclass
class Catalog:
    db_dir: Path
    algebras: dict[str, AlgebraRecord]
    certificates: dict[str, list[CertificateRecord]]
    obstructions: dict[str, ObstructionRecord]
    settings: Settings = field(default_factory=Settings)
    _checked: set = field(default_factory=set, repr=False)

    def names(self, include_members: bool = False) -> list[str]:
        return [n for n, r in self.algebras.items() if include_members or r.member_of is None]

    def record(self, name: str) -> AlgebraRecord:
        if name not in self.algebras:
            raise NotFound(f"no algebra named {name!r} in {self.db_dir}")
        return self.algebras[name]

    def resolve(self, name: str, param: Fraction | None = None) -> tuple[AlgebraRecord, Fraction | None]:
        """Follow a family value to its member record, e.g. 1357N at -2 to 1357N(-2)."""
        record = self.record(name)
        if param is not None and record.is_family:
            for other in self.algebras.values():
                if other.member_of == name and other.member_param == param:
                    logger.info("%s at L=%s is recorded separately as %s", name, param, other.name)
                    return other, None
        return record, param

    def algebra(self, name: str, param: Fraction | None = None) -> NilpotentLieAlgebra:
        """Build the algebra of a record; families need a parameter value."""
        record = self.record(name)
        if record.is_family:
            if param is None:
                raise RegimeViolation(f"{name} is a one-parameter family; give a value of {record.param}")
            return instantiate_family(record, param)
        if param is not None:
            raise RegimeViolation(f"{name} has no parameter")
        try:
            return build_algebra(parse_structure(record.structure), name)
        except (ParseError, BadSpec, JacobiViolation) as exc:
            raise ConsistencyError(f"{name}: {exc}") from exc

    def lookup(self, name: str) -> tuple[AlgebraRecord, list[CertificateRecord]]:
        """Record plus certificates, after checking the record against its equations."""
        record = self.record(name)
        if name not in self._checked:
            for value in (self.samples(name) if record.is_family else (None,)):
                check_record(record, self.algebra(name, value))
            self._checked.add(name)
        return record, self.certificates.get(name, [])

    def samples(self, name: str) -> tuple[Fraction, ...]:
        """Configured sample values for a family, else the recorded ones."""
        record = self.record(name)
        values = self.settings.family_samples.get(name)
        if values is None:
            return record.samples
        for v in values:
            if record.constraint is not None and not record.constraint.contains(v):
                raise RegimeViolation(f"configured sample {v} for {name} violates {record.constraint}")
        return values

    def certificate_for(self, name: str, param: Fraction | None = None) -> CertificateRecord:
        matches = [c for c in self.certificates.get(name, []) if c.applies_to(param)]
        if not matches:
            where = "" if param is None else f" at L={param}"
            raise NotFound(f"no certificate for {name}{where}")
        if len(matches) > 1:
            raise ConsistencyError(f"{name}: regimes {[str(c.regime) for c in matches]} overlap at L={param}")
        return matches[0]

    def families(self) -> list[AlgebraRecord]:
        return [r for r in self.algebras.values() if r.is_family]

    def census(self) -> dict[str, dict[str, int]]:
        """Counts per step among indecomposable records, members excluded."""
        out: dict[str, dict[str, int]] = {}
        for r in self.algebras.values():
            if r.decomposable or r.member_of is not None:
                continue
            row = out.setdefault(f"step {r.step}", {"total": 0, PURE: 0, NO_COCLOSED: 0})
            row["total"] += 1
            if r.status in row:
                row[r.status] += 1
        return out


def check_record(record: AlgebraRecord, g: NilpotentLieAlgebra) -> None:
    """Stored step and center must agree with the structure equations."""
    step = nilpotency_step(g)
    if step != record.step:
        raise ConsistencyError(f"{g.name}: computed step {step}, record says {record.step}")
    z = center(g)
    for i in record.center:
        if not 1 <= i <= g.n or not z.contains(basis_vector(g.n, i)):
            raise ConsistencyError(f"{g.name}: e{i} is recorded as central but is not")


def load_catalog(db_dir: Path | None = None, settings: Settings | None = None) -> Catalog:
    """Read the three database files; G2CERT_DB overrides db_dir."""
    env = os.environ.get(DB_ENV)
    db_dir = Path(env) if env else (db_dir or default_db_dir())
    if not (db_dir / ALGEBRAS_FILE).exists():
        raise NotFound(f"no {ALGEBRAS_FILE} in {db_dir}")

    settings = settings or Settings()
    strict = settings.strict_checksums
    algebras: dict[str, AlgebraRecord] = {}
    for lineno, parts in _read_db(db_dir / ALGEBRAS_FILE, strict):
        record = _algebra_record(lineno, parts)
        if record.name in algebras:
            raise ConsistencyError(f"{ALGEBRAS_FILE}:{lineno}: duplicate algebra {record.name}")
        algebras[record.name] = record

    certificates: dict[str, list[CertificateRecord]] = {}
    cert_path = db_dir / CERTIFICATES_FILE
    if cert_path.exists():
        for lineno, parts in _read_db(cert_path, strict):
            cert = _certificate_record(lineno, parts)
            if cert.algebra not in algebras:
                raise ConsistencyError(f"{CERTIFICATES_FILE}:{lineno}: unknown algebra {cert.algebra}")
            certificates.setdefault(cert.algebra, []).append(cert)

    obstructions: dict[str, ObstructionRecord] = {}
    obs_path = db_dir / OBSTRUCTIONS_FILE
    if obs_path.exists():
        for lineno, parts in _read_db(obs_path, strict):
            rec = _obstruction_record(lineno, parts)
            if rec.name not in algebras:
                raise ConsistencyError(f"{OBSTRUCTIONS_FILE}:{lineno}: unknown algebra {rec.name}")
            obstructions[rec.name] = rec

    logger.debug(
        "loaded %d algebras, %d certificates, %d pinned obstructions from %s",
        len(algebras), sum(len(v) for v in certificates.values()), len(obstructions), db_dir,
    )
    return Catalog(db_dir, algebras, certificates, obstructions, settings)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

def instantiate_family(record: AlgebraRecord, value: Fraction) -> NilpotentLieAlgebra:
    """The member of a one-parameter family at L = value."""
    if not record.is_family:
        raise UnknownFamily(f"{record.name} is not a family")
    value = Fraction(value)
    if record.constraint is not None and not record.constraint.contains(value):
        raise RegimeViolation(f"{record.name}: L={value} violates {record.constraint}")
    try:
        return build_algebra(parse_structure(record.structure, param=value), f"{record.name}({value})")
    except (ParseError, BadSpec, JacobiViolation) as exc:
        raise ConsistencyError(f"{record.name}({value}): {exc}") from exc


def _invariant_147E(x: Fraction) -> Fraction:
    if x in (0, 1):
        raise DomainError(f"147E invariant is undefined at L={x}")
    return (1 - x + x * x) ** 3 / (x * x * (x - 1) ** 2)


def _invariant_1357QRS1(x: Fraction) -> Fraction:
    if x == 0:
        raise DomainError("1357QRS1 invariant is undefined at L=0")
    return x + 1 / x


FAMILY_INVARIANTS = {
    "147E": _invariant_147E,
    "1357QRS1": _invariant_1357QRS1,
}


def family_invariant(name: str, value) -> Fraction:
    """Isomorphism invariant of a family member: equal values, isomorphic algebras."""
    if name not in FAMILY_INVARIANTS:
        raise UnknownFamily(f"no isomorphism invariant is recorded for {name}")
    return FAMILY_INVARIANTS[name](Fraction(value))


def same_member(name: str, a, b) -> bool:
    return family_invariant(name, a) == family_invariant(name, b)

"""
Tests for the bundled database: loading, consistency checks, families.
"""

import logging
import shutil
from fractions import Fraction

import pytest

from g2cert import catalog as catalog_module
from g2cert.catalog import (
    COCLOSED_ONLY_EXTERNAL,
    NO_COCLOSED,
    PURE,
    family_invariant,
    instantiate_family,
    load_catalog,
    same_member,
)
from g2cert.cli import verify_entry
from g2cert.config import DB_ENV, Settings
from g2cert.errors import (
    BadCertificate,
    ConsistencyError,
    DomainError,
    NotFound,
    RegimeViolation,
    UnknownFamily,
)
from g2cert.lie_ce import center, cohomology_dim
from g2cert.obstructions import Method
from g2cert.report import EXTERNAL_CITATION, PURE_VERIFIED


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


@pytest.fixture
def db_copy(tmp_path, monkeypatch):
    """A writable copy of the bundled database."""
    monkeypatch.delenv(DB_ENV, raising=False)
    target = tmp_path / "db"
    shutil.copytree(catalog_module.default_db_dir(), target)
    return target


def _certificates_in(catalog, names):
    return sum(len(catalog.certificates.get(n, [])) for n in names)


def _stored_certificates():
    """(name, value) for every certificate row, once per family sample in its regime."""
    catalog = load_catalog()
    cases = []
    for name, certs in catalog.certificates.items():
        record = catalog.record(name)
        for cert in certs:
            if not record.is_family:
                cases.append(pytest.param(name, None, id=cert.label))
                continue
            for value in catalog.samples(name):
                if cert.applies_to(value):
                    cases.append(pytest.param(name, value, id=f"{cert.label}[{value}]"))
    return cases


class TestCensus:
    """Record counts per step."""

    def test_indecomposable_census(self, catalog):
        census = catalog.census()
        assert census["step 2"] == {"total": 9, PURE: 7, NO_COCLOSED: 2}
        assert census["step 3"] == {"total": 52, PURE: 35, NO_COCLOSED: 17}
        assert census["step 4"] == {"total": 43, PURE: 40, NO_COCLOSED: 3}

    def test_decomposable_count(self, catalog):
        assert sum(1 for r in catalog.algebras.values() if r.decomposable) == 35

    def test_certificate_rows(self, catalog):
        records = catalog.algebras.values()
        assert _certificates_in(catalog, [r.name for r in records if r.decomposable]) == 23
        for step, expected in ((2, 7), (3, 35), (4, 48)):
            names = [r.name for r in records if not r.decomposable and r.step == step]
            assert _certificates_in(catalog, names) == expected

    def test_member_records_are_not_counted(self, catalog):
        assert "1357N(-2)" in catalog.names(include_members=True)
        assert "1357N(-2)" not in catalog.names()


class TestLookup:
    """Single records."""

    def test_37B(self, catalog):
        record, certs = catalog.lookup("37B")
        assert record.step == 2
        assert record.status == PURE
        assert len(certs) == 1
        assert certs[0].expect_psi_plus
        assert certs[0].expected_metric()[6] == [0, 0, 0, 0, 1, 0, 2]

    def test_external(self, catalog):
        record, certs = catalog.lookup("n2")
        assert record.status == COCLOSED_ONLY_EXTERNAL
        assert certs == []

    def test_obstructed(self, catalog):
        record, _ = catalog.lookup("357B")
        assert record.status == NO_COCLOSED
        assert record.method is Method.IDEAL
        assert catalog.obstructions["357B"].method is Method.IDEAL

    def test_unknown(self, catalog):
        with pytest.raises(NotFound):
            catalog.record("99Z")

    def test_member_redirect(self, catalog):
        record, param = catalog.resolve("1357N", Fraction(-2))
        assert record.name == "1357N(-2)"
        assert record.member_param == -2
        assert param is None

    def test_family_needs_parameter(self, catalog):
        with pytest.raises(RegimeViolation):
            catalog.algebra("147E")
        with pytest.raises(RegimeViolation):
            catalog.algebra("37B", Fraction(1))


class TestFamilies:
    """One-parameter families, regimes and invariants."""

    def test_instantiate(self, catalog):
        g = instantiate_family(catalog.record("147E"), Fraction(2))
        assert g.name == "147E(2)"
        assert g.n == 7

    def test_excluded_value(self, catalog):
        with pytest.raises(RegimeViolation):
            instantiate_family(catalog.record("147E"), Fraction(1))

    def test_not_a_family(self, catalog):
        with pytest.raises(UnknownFamily):
            instantiate_family(catalog.record("37B"), Fraction(1))

    @pytest.mark.parametrize("value, regime", [
        (Fraction(-3), "L<-2"),
        (Fraction(-1), "-2<L<0"),
        (Fraction(0), "L=0"),
        (Fraction(5), "L>0"),
    ])
    def test_regimes(self, catalog, value, regime):
        assert str(catalog.certificate_for("1357N", value).regime) == regime

    def test_every_sample_has_one_certificate(self, catalog):
        for record in catalog.families():
            for value in catalog.samples(record.name):
                cert = catalog.certificate_for(record.name, value)
                if not cert.cited:
                    assert cert.instantiate(7, value).param == value

    def test_every_regime_is_sampled(self, catalog):
        for record in catalog.families():
            for cert in catalog.certificates[record.name]:
                assert any(cert.applies_to(v) for v in catalog.samples(record.name)), cert.label

    def test_cited_regimes(self, catalog):
        cited = [c.label for certs in catalog.certificates.values() for c in certs if c.cited]
        assert cited == ["1357N@L<-2", "1357N@-2<L<0"]
        with pytest.raises(BadCertificate):
            catalog.certificate_for("1357N", Fraction(-3)).instantiate(7, Fraction(-3))

    def test_invariants(self):
        assert family_invariant("147E", 2) == Fraction(27, 4)
        assert family_invariant("147E", -1) == Fraction(27, 4)
        assert same_member("147E", 2, -1)
        assert family_invariant("1357QRS1", 2) == Fraction(5, 2)
        assert same_member("1357QRS1", 2, Fraction(1, 2))
        assert not same_member("1357QRS1", 2, 3)

    def test_invariant_domain(self):
        with pytest.raises(DomainError):
            family_invariant("147E", 0)
        with pytest.raises(DomainError):
            family_invariant("1357QRS1", 0)
        with pytest.raises(UnknownFamily):
            family_invariant("37B", 1)

    def test_configured_samples(self, db_copy):
        settings = Settings(family_samples={"147E": (Fraction(5),)})
        cat = load_catalog(db_copy, settings)
        assert cat.samples("147E") == (Fraction(5),)

    def test_configured_sample_outside_constraint(self, db_copy):
        cat = load_catalog(db_copy, Settings(family_samples={"147E": (Fraction(1),)}))
        with pytest.raises(RegimeViolation):
            cat.samples("147E")


class TestStoredCertificates:
    """Every stored certificate verifies; cited regimes report as citations."""

    @pytest.mark.parametrize("name, value", _stored_certificates())
    def test_certificate_verifies(self, catalog, name, value):
        entry = verify_entry(catalog, name, value)
        assert entry.status_verified in (PURE_VERIFIED, EXTERNAL_CITATION), entry.detail

    @pytest.mark.parametrize("value", [Fraction(-3), Fraction(-1, 2)])
    def test_1357N_negative_regimes_are_cited(self, catalog, value):
        assert verify_entry(catalog, "1357N", value).status_verified == EXTERNAL_CITATION

    @pytest.mark.parametrize("name, value", [
        ("1357N", Fraction(0)),
        ("1357N", Fraction(1, 3)),
        ("1357N", Fraction(7, 2)),
        ("1357QRS1", Fraction(3)),
        ("1357QRS1", Fraction(-1, 3)),
        ("1357S", Fraction(0)),
        ("1357S", Fraction(5)),
        ("1357M", Fraction(-1, 3)),
    ])
    def test_family_members_off_the_samples(self, catalog, name, value):
        entry = verify_entry(catalog, name, value)
        assert entry.status_verified == PURE_VERIFIED, entry.detail


class TestConsistency:
    """Stored data is checked against the structure equations."""

    def test_every_record_matches_its_equations(self, catalog):
        for name in catalog.names(include_members=True):
            record, _ = catalog.lookup(name)
            values = catalog.samples(name) if record.is_family else (None,)
            for value in values:
                g = catalog.algebra(name, value)
                assert center(g).dim >= 1
                assert cohomology_dim(g, 1) >= 2

    def test_bad_center(self, db_copy):
        path = db_copy / "algebras.db"
        text = path.read_text().replace("eq=(0^4,12,23,34) | center=5,6,7", "eq=(0^4,12,23,34) | center=1,5,6,7")
        path.write_text(text)
        cat = load_catalog(db_copy)
        with pytest.raises(ConsistencyError):
            cat.lookup("37B")

    def test_checksum_mismatch_warns(self, db_copy, caplog):
        path = db_copy / "obstructions.db"
        path.write_text(path.read_text() + "357A | method=ideal | a=e1 | b=e2\n")
        with caplog.at_level(logging.WARNING):
            cat = load_catalog(db_copy)
        assert "checksum mismatch" in caplog.text
        assert "357A" in cat.obstructions

    def test_checksum_mismatch_strict(self, db_copy):
        path = db_copy / "obstructions.db"
        path.write_text(path.read_text() + "357A | method=ideal | a=e1 | b=e2\n")
        with pytest.raises(ConsistencyError, match="checksum mismatch"):
            load_catalog(db_copy, Settings(strict_checksums=True))

    def test_missing_checksum_strict(self, db_copy):
        path = db_copy / "certificates.db"
        path.write_text("".join(
            line for line in path.read_text().splitlines(keepends=True) if not line.startswith("# sha256:")
        ))
        load_catalog(db_copy)
        with pytest.raises(ConsistencyError, match="no checksum header"):
            load_catalog(db_copy, Settings(strict_checksums=True))

    def test_bundled_checksums_are_current(self, monkeypatch):
        monkeypatch.delenv(DB_ENV, raising=False)
        assert load_catalog(settings=Settings(strict_checksums=True)).algebras

    def test_structure_equations_violating_jacobi(self, db_copy):
        path = db_copy / "algebras.db"
        text = path.read_text()
        assert "eq=(0^3,12,23,-13,15+16+26-2*34)" in text
        path.write_text(text.replace("eq=(0^3,12,23,-13,15+16+26-2*34)", "eq=(0^3,12,23,-13,15+16+26+2*34)"))
        cat = load_catalog(db_copy)
        with pytest.raises(ConsistencyError, match="147D"):
            cat.lookup("147D")

    def test_cited_row_cannot_carry_forms(self, db_copy):
        path = db_copy / "certificates.db"
        path.write_text(path.read_text() + "1357N@L<-2 | cited=x | omega=e12 | psi=e135 | eta=e7\n")
        with pytest.raises(ConsistencyError):
            load_catalog(db_copy)

    def test_duplicate_record(self, db_copy):
        path = db_copy / "algebras.db"
        row = next(line for line in path.read_text().splitlines() if line.startswith("37B |"))
        path.write_text(path.read_text() + row + "\n")
        with pytest.raises(ConsistencyError):
            load_catalog(db_copy)

    def test_unknown_algebra_in_certificates(self, db_copy):
        path = db_copy / "certificates.db"
        path.write_text(path.read_text() + "99Z | omega=e12 | psi=e135 | eta=e7\n")
        with pytest.raises(ConsistencyError):
            load_catalog(db_copy)

    def test_environment_override(self, db_copy, monkeypatch, tmp_path):
        monkeypatch.setenv(DB_ENV, str(db_copy))
        cat = load_catalog(tmp_path / "elsewhere")
        assert cat.db_dir == db_copy

    def test_missing_database(self, tmp_path, monkeypatch):
        monkeypatch.delenv(DB_ENV, raising=False)
        with pytest.raises(NotFound):
            load_catalog(tmp_path)

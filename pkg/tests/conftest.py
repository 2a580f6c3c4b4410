from __future__ import annotations

from dataclasses import replace

import pytest

from citematch.model import Author, CitedReference, Domain, TargetArticle


def make_target(id: str = "T1", **kw) -> TargetArticle:
    base = TargetArticle(
        id=id,
        first_author_last="Shi",
        first_initial="D",
        second_initial="Q",
        all_authors=(Author("Shi", "DQ"), Author("Meyer", "KL")),
        pub_year=2003,
        pub_name_full="Heteroatom Chemistry",
        pub_name_abbrevs=("HETEROATOM CHEM",),
        volume="14",
        issue="3",
        start_page="266",
        end_page="270",
        doi="10.1002/hc.10148",
        article_title="A title",
        domain_tag=Domain.NATURAL_SCIENCES,
        accumulated_citations=5,
    )
    return replace(base, **kw)


def make_ref(target: TargetArticle | None = None, ref_id: str = "R1", **kw) -> CitedReference:
    t = target or make_target()
    base = CitedReference(
        ref_id=ref_id,
        source_article_id="S1",
        first_author_last=t.first_author_last.upper(),
        first_initial=t.first_initial,
        second_initial=t.second_initial,
        pub_year=t.pub_year,
        pub_name=t.primary_pub_name,
        volume=t.volume,
        issue=t.issue,
        start_page=t.start_page,
        doi=t.doi,
    )
    return replace(base, **kw)


@pytest.fixture
def target() -> TargetArticle:
    return make_target()


# --- acceptance summary ---------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        prev = _ACCEPTANCE.get(number, (title, "PASS"))[1]
        _ACCEPTANCE[number] = (title, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, verdict = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")

"""Shared fixtures: a local HTTP server for the committed fixture site."""

import functools
import threading
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

import pytest

import suite_paths
from suite_paths import SITE_ROOT


def pytest_runtest_logreport(report):
    """Record one verdict per acceptance criterion as its test finishes."""
    if "test_acceptance.py" not in report.nodeid:
        return
    criterion = suite_paths.PRIMARY_CRITERIA.get(report.nodeid.split("::")[-1])
    if criterion is None:
        return
    if report.when == "call":
        verdict = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
    elif report.when == "setup" and not report.passed:
        verdict = "SKIP" if report.skipped else "FAIL"
    else:
        return
    suite_paths.PRIMARY_VERDICTS.append(f"[PRIMARY] {criterion}: {verdict}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print the per-criterion verdicts where capture can't swallow them."""
    if not suite_paths.PRIMARY_VERDICTS:
        return
    terminalreporter.section("primary acceptance criteria")
    for line in suite_paths.PRIMARY_VERDICTS:
        terminalreporter.write_line(line)


class SiteHandler(SimpleHTTPRequestHandler):
    """Serves the fixture site with explicit types for non-HTML assets.

    Every request path lands in ``server.requested_paths`` so tests can
    assert which URLs were (and were not) fetched.
    """

    extensions_map = {
        **SimpleHTTPRequestHandler.extensions_map,
        ".xlsx": "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
        ".zip": "application/zip",
    }

    def log_message(self, *args):
        pass

    def do_GET(self):
        self.server.requested_paths.append(self.path)
        super().do_GET()


class FixtureSite:
    def __init__(self, server: ThreadingHTTPServer):
        self.server = server
        host, port = server.server_address[:2]
        self.base_url = f"http://{host}:{port}/"

    @property
    def requested_paths(self):
        return self.server.requested_paths

    def clear_log(self):
        del self.server.requested_paths[:]

    def url(self, path: str) -> str:
        return self.base_url + path.lstrip("/")


@pytest.fixture(scope="session")
def site():
    handler = functools.partial(SiteHandler, directory=str(SITE_ROOT))
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    server.requested_paths = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield FixtureSite(server)
    server.shutdown()
    thread.join(timeout=5)


@pytest.fixture
def seeds_file(site, tmp_path):
    path = tmp_path / "seeds.txt"
    path.write_text(site.base_url + "\n", encoding="utf-8")
    return path

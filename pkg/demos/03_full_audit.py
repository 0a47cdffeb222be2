"""
Full audit of a local site
==========================

Serves the repository's fixture site over a local HTTP port, runs every
pipeline stage against it (crawl -> extract -> classify -> affect ->
report), and prints where the tables landed. The whole run is offline
and deterministic, finishing in a few seconds.
"""

import functools
import tempfile
import threading
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from tfa_audit.cli import run
from tfa_audit.config import PipelineConfig

SITE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "site"


class QuietHandler(SimpleHTTPRequestHandler):
    def log_message(self, *args):
        pass


# 1. Stand up the demo site on an ephemeral port.
server = ThreadingHTTPServer(
    ("127.0.0.1", 0), functools.partial(QuietHandler, directory=str(SITE))
)
threading.Thread(target=server.serve_forever, daemon=True).start()
host, port = server.server_address
print(f"serving fixture site at http://{host}:{port}/")

with tempfile.TemporaryDirectory() as scratch:
    seeds = Path(scratch) / "seeds.txt"
    seeds.write_text(f"http://{host}:{port}/\n")

    # 2. Run the complete pipeline with offline backends.
    cfg = PipelineConfig(
        seeds=str(seeds),
        out=str(Path(scratch) / "run"),
        delay_ms=0,
        zeroshot_backend="lexical",
        threshold=0.25,  # lexical scores are sparse fractions; lower the bar
    )
    code, summary = run("all", cfg)
    assert code == 0, summary

    # 3. Show what each stage did and where the reports are.
    for stage, result in summary["stages"].items():
        note = {k: v for k, v in result.items() if k not in ("seeds", "files")}
        print(f"{stage:<9} {note}")
    print()
    report_md = Path(cfg.out) / "reports" / "report.md"
    print(f"--- {report_md} ---")
    print("\n".join(report_md.read_text().splitlines()[:24]))

server.shutdown()

"""Produce the full report bundle the CLI `pipeline` command writes.

Run from the repository root:  python demos/report_bundle.py [OUTDIR]
"""
import sys
from pathlib import Path

from corefdiv.report import RunConfig, cmd_pipeline
from corefdiv.samples import sample_path

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_report")
cfg = RunConfig.from_mapping({"inputs": [str(sample_path("news"))], "labels": ["sample"],
                              "out": str(out)})
res = cmd_pipeline(cfg)
for name, path in res["files"].items():
    print(f"{name:16s} {path}")
print()
print((out / "stats.txt").read_text())

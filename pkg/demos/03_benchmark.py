"""Generate a small synthetic database and benchmark both detectors.

    python demos/03_benchmark.py [out_dir]

Equivalent CLI:

    vhface synth --count 30 --seed 1 --out DIR/th
    vhface bench --manifest DIR/th/manifest.json --detector vh --detector vj --report r.json
"""

import json
import sys
from pathlib import Path

from vhface.bench import VhDetector, VjDetector, format_report, load_manifest, run_benchmark
from vhface.cascade import load_shipped_cascade
from vhface.synth import write_dataset

root = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_bench")

# 30 images per spectrum, illumination cycling AR / IR / NA
entries = []
for spectrum, seed in [("VIS", 11), ("TH", 12)]:
    sub = root / spectrum.lower()
    write_dataset(sub, 30, seed=seed, spectrum=spectrum)
    for e in json.loads((sub / "manifest.json").read_text()):
        entries.append({**e, "image": f"{sub.name}/{e['image']}",
                        "ground_truth": f"{sub.name}/{e['ground_truth']}"})
(root / "manifest.json").write_text(json.dumps(entries, indent=2))

manifest = load_manifest(root / "manifest.json")
report = run_benchmark(manifest, [VhDetector(), VjDetector(load_shipped_cascade())])
print(format_report(report))

(root / "report.json").write_text(report.to_json())
failures = [d for d in report.details if not d["success"]]
print(f"{len(failures)} failed detections; details in {root / 'report.json'}")

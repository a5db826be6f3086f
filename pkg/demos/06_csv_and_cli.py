"""Reading panel data from CSV and driving the command-line interface.

Rows are panels (e.g. insurers) and columns are time points (e.g. years).
Claims can be log-transformed or normalised by premiums before testing.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from shortpanel import IngestOptions, load_panel_csv
from shortpanel.io import write_panel_csv

tmp = Path(tempfile.mkdtemp())
rng = np.random.default_rng(3)
premium = rng.uniform(50, 150, size=(30, 10))
claims = premium * np.exp(0.2 * rng.standard_normal((30, 10)))
write_panel_csv(tmp / "claims.csv", claims)
write_panel_csv(tmp / "premium.csv", premium)

loss_ratio = load_panel_csv(tmp / "claims.csv", IngestOptions(transform="premium", premium_path=str(tmp / "premium.csv")))
print("loss ratios, first panel:", np.round(loss_ratio[0], 3))

cli = [sys.executable, "-m", "shortpanel"]
out = subprocess.run(
    cli + ["test", str(tmp / "claims.csv"), "--transform", "log", "--seed", "1", "--B", "500", "--M", "500"],
    capture_output=True, text=True, check=True,
)
report = json.loads(out.stdout)
for method, r in report["results"].items():
    print(f"{method:10s} R={r['statistic']:.2f} cv={r['critical_value']:.2f} -> {r['decision']}")

out = subprocess.run(cli + ["estimate", str(tmp / "claims.csv")], capture_output=True, text=True, check=True)
print("tau_hat:", json.loads(out.stdout)["results"]["tau_hat"])

# errors come back as JSON with a non-zero exit status
bad = subprocess.run(cli + ["test", str(tmp / "claims.csv"), "--alpha", "2"], capture_output=True, text=True)
print("exit", bad.returncode, json.loads(bad.stdout)["error"]["code"])

# Copyright 2026 The HyFL-Sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Plots accuracy curves from hyfl output.

Accepts a scenario curves.csv (one curve per label) or any number of run
metrics.csv files (one curve per file, labelled by its directory).

  python3 tools/plot.py runs/q1-convergence/curves.csv -o q1.png
  python3 tools/plot.py runs/a/metrics.csv runs/b/metrics.csv -o ab.png
"""

import argparse
import csv
import pathlib
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load_curves(paths):
    curves = defaultdict(list)
    for path in map(pathlib.Path, paths):
        with path.open(newline="") as f:
            for row in csv.DictReader(f):
                label = row.get("label") or path.parent.name
                curves[label].append((int(row["round"]), float(row[args.metric])))
    return {k: sorted(v) for k, v in curves.items()}


parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("csv", nargs="+", help="curves.csv or metrics.csv files")
parser.add_argument("-o", "--output", default="accuracy.png", help="image file to write")
parser.add_argument("--metric", default="accuracy", help="column to plot (default accuracy)")
parser.add_argument("--title", default="", help="figure title")
args = parser.parse_args()

fig, ax = plt.subplots(figsize=(7, 4.5))
for label, points in load_curves(args.csv).items():
    rounds, values = zip(*points)
    ax.plot(rounds, values, label=label, linewidth=1.2)
ax.set_xlabel("round")
ax.set_ylabel(args.metric)
if args.title:
    ax.set_title(args.title)
ax.grid(alpha=0.3)
ax.legend(fontsize="small", ncol=2)
fig.tight_layout()
fig.savefig(args.output, dpi=150)
print(f"wrote {args.output}")

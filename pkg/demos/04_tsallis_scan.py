"""Detection thresholds of the Tsallis scalar detector on Werner states.

Larger orders detect more states; the infinite order reaches 1/(1+d).
Writes fig1.csv next to the working directory.

Run: python demos/04_tsallis_scan.py
"""

import math

from majorization.cli import scan_csv
from majorization.detectors import werner_scan

points = werner_scan(range(2, 9), [1, 2, 5, math.inf])
for p in points:
    print(f"d={p.d} {str(p.measure):12s} q*={p.q_star:.6f}")

with open("fig1.csv", "w", newline="\n") as fh:
    fh.write(scan_csv(points))
print("wrote fig1.csv")

"""
Config-driven sweeps
====================

The experiment layer reads the same ``key = value`` text as the command
line tool. Here a short total-time sweep runs on a small lattice and is
written to CSV, metadata and SVG.
"""

from cornerpump.experiments import parse_config, run_experiment

text = """
experiment = sweep-T
L = 6
sweep = 40:120:40
workers = 1
output_dir = out/demo-sweep
"""
cfg = parse_config(text)
print(cfg.echo())
for path in run_experiment(cfg, svg=True):
    print("wrote", path)
print(open("out/demo-sweep/sweep-T.csv").read())

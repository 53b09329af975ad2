"""Landmark-guided hierarchical RL with diversity-augmented tabular skills.

The package is organized bottom-up:

- pddl / model: a small STRIPS-subset parser and propositional grounder
- landmarks: fact-landmark extraction plus a brute-force verification oracle
- envs: deterministic gridworld simulators with fluent detectors
- skills / meta: diverse low-level skills and the history-state controller
- baselines: the four comparison methods
- clustering: online k-means for the pixel variant
- harness / cli: seeded experiment matrix and CSV output
"""

__version__ = "0.1.0"

"""Loss-spike monitoring on a synthetic training run.

The stream contains a narrow one-step glitch (tolerated) and a wide
multi-step excursion (rolled back).  The dual-threshold detector requires
the whole window above the sustained floor AND a peak above the severity
threshold, so only the wide spike reaches the restart tier.
"""

import math
import random

from corpusops.runwatch import (
    DetectorTier,
    MetricPoint,
    MonitorConfig,
    run_monitor,
    spike_score,
)

rng = random.Random(6)

# A decaying loss curve with noise, a narrow glitch, and a wide spike.
values = [2.8 * math.exp(-t / 900) + 0.9 + rng.gauss(0, 0.01) for t in range(1200)]
values[400] = 4.2                      # narrow: one step only
for t in range(800, 809):              # wide: sustained divergence
    values[t] = 3.4 + rng.random()

config = MonitorConfig(
    alert=DetectorTier(name="alert", window=3, t_min=2.6, t_max=3.0),
    restart=DetectorTier(name="restart", window=6, t_min=2.8, t_max=3.5),
    checkpoint_interval=250,
    total_steps=1200,
)

print(f"z-score window: {config.z_window} steps (1% of the declared run)")
z_narrow, flagged = spike_score(values[:401], config.z_window)
print(f"robust z at the narrow glitch (step 400): {z_narrow:.1f} "
      f"{'-> flagged' if flagged else ''}")

events = list(run_monitor((MetricPoint(t, v) for t, v in enumerate(values)), config))
alerts = [e for e in events if e.tier == 1]
restarts = [e for e in events if e.tier == 2]

print(f"\n{len(alerts)} alert events, {len(restarts)} restart events")
for event in restarts:
    print(f"  restart at step {event.step}: window "
          f"[{event.window_min:.2f}, {event.window_max:.2f}], z={event.z:.1f}")
    print(f"  -> roll back to checkpoint step {event.rollback_step} "
          f"(interval {config.checkpoint_interval})")

print("\nthe narrow glitch produced no restart event:",
      all(not 400 <= e.step <= 406 for e in restarts))

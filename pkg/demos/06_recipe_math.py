"""Hyperparameter bookkeeping for a large pre-training run.

Reproduces the arithmetic of a 70B-scale recipe: pick a target averaging
timescale, transfer it across tokens-per-parameter budgets, solve for the
weight decay, align the batch size to the accelerator count, and sample
the learning-rate schedule.
"""

from corpusops.recipe import (
    Schedule,
    ScheduleKind,
    Stage,
    StagePlan,
    align_batch,
    build_plan,
    lr_at,
    scale_tau,
    validate_stage_plan,
)

# A timescale tuned at 20 tokens-per-parameter transfers to the 175-TPP
# production budget by the 1/sqrt(TPP) law.
tau_pilot = 0.2
tau_target = scale_tau(tau_pilot, 20, 175)
print(f"timescale transfer: {tau_pilot} @ 20 TPP -> {tau_target:.4f} @ 175 TPP")

# The scaling law suggested 1136 sequences; the cluster wants multiples
# of 400, so round up.
sequences = align_batch(1136, 400)
batch_tokens = sequences * 8192
print(f"batch alignment: 1136 -> {sequences} sequences "
      f"({batch_tokens / 1e6:.1f}M tokens per step)")

plan = build_plan(
    batch_tokens=9.8e6,
    lr=1.5e-4,
    total_tokens=12.25e12,
    tau_target=0.1066,
    params=70e9,
)
print(f"\nresolved plan: wd={plan.weight_decay:.4f} steps={plan.steps:,} "
      f"tau={plan.tau:.4f} TPP={plan.tokens_per_parameter:.0f}")

schedule = Schedule(
    kind=ScheduleKind.COSINE_TO_FLOOR,
    peak=1.5e-4,
    floor=1.5e-6,
    total_steps=plan.steps,
    warmup_steps=plan.steps // 10,
)
print("\nschedule samples (cosine to a non-zero floor):")
for fraction in (0.0, 0.1, 0.25, 0.5, 0.75, 1.0):
    step = round(fraction * schedule.total_steps)
    print(f"  step {step:>9,}: lr = {lr_at(step, schedule):.3e}")

stages = StagePlan(
    stages=(
        Stage(8_192, 1769e9, 0.5e6, 1.5e-5, 6e-6, ScheduleKind.COSINE_TO_FLOOR, 1),
        Stage(65_536, 590e9, 1e6, 6e-6, 6e-6, ScheduleKind.CONSTANT, 1),
        Stage(131_072, 229e9, 10e6, 6e-6, 6e-6, ScheduleKind.CONSTANT, 2),
        Stage(524_288, 131e9, 10e6, 6e-6, 6e-6, ScheduleKind.CONSTANT, 8),
    )
)
violations = validate_stage_plan(stages)
print(f"\nstage plan check: {'clean' if not violations else violations}")

# Shrinking a RoPE base mid-plan is the classic long-context mistake.
bad = StagePlan(stages=stages.stages[:2] + (
    Stage(131_072, 229e9, 0.4e6, 6e-6, 6e-6, ScheduleKind.CONSTANT, 2),
))
print("broken plan check:")
for violation in validate_stage_plan(bad):
    print(f"  {violation}")

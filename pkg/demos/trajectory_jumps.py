"""Quantum-jump view of the emission cycle.

Single trajectories make the bundle character visible directly: within one
pulse period the cavity channel fires exactly as many times as the bundle
holds photons, and the two clicks of a pair arrive within a cavity lifetime
of each other.
"""

import numpy as np

from photonbundles import cli, mcwf
from photonbundles import dynamics as dyn
from photonbundles.drive import with_solved_carriers
from photonbundles.rabi import compute_spectrum

s = cli.resolve_scenario("two_photon")
spec = compute_spectrum(s.model, s.space.n_fock)
pt = with_solved_carriers(s.pulse_train(), spec, s.model, s.target)
basis = dyn.build_dressed_basis(spec, s.model, s.space, n_keep=s.resolved_n_keep)
channels = dyn.build_jump_channels(basis, s.decay, s.space)

t_grid = np.linspace(0.0, pt.period, 36)
ens = mcwf.ensemble_average(
    basis, channels, pt, basis.unit_state(s.initial_state), t_grid,
    n_traj=20, seed0=s.seed, target=s.target,
)

js = mcwf.jump_statistics(ens, pt, channel="a")
print(f"cavity jumps per cycle over {ens.n_traj} trajectories: {js.count_histogram}")
print(f"fraction with exactly 2: {js.fraction_with(2):.2f}")

print("\nfirst few trajectories, cavity click times:")
for k, rec in enumerate(ens.jump_records[:5]):
    times = [f"{ev.time:.0f}" for ev in rec if ev.channel == "a"]
    print(f"  trajectory {k}: {', '.join(times) if times else 'no clicks'}")

gaps = []
for rec in ens.jump_records:
    times = [ev.time for ev in rec if ev.channel == "a"]
    gaps += [b - a for a, b in zip(times, times[1:])]
if gaps:
    print(f"\nmedian gap inside a bundle: {np.median(gaps):.0f} time units "
          f"(cavity lifetime {1.0 / s.decay.a:.0f})")

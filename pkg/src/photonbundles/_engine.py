"""Compiled propagation kernels.

Everything here is numba-compiled and operates on flat arrays prepared by
`dynamics`.  The Hamiltonian is a term table: entry i couples basis states
(rows[i], cols[i]) with matrix element amps[i] * env(t) * exp(i*freqs[i]*t),
where env is a shared Gaussian pulse-train shape selected by pulse[i]
(0 or 1) or the constant 1 (pulse[i] < 0, used for static diagonal terms).
The Hermitian conjugate of every off-diagonal term is implied.

Dissipation enters as rank-1 lowering channels (src -> dst, rate); the
coherent drift uses the total escape rate per state and the master equation
adds the diagonal refilling terms, which keeps the trace conserved exactly
at the level of the right-hand side.

Integration is an adaptive Dormand-Prince 5(4) pair with FSAL, stepping
exactly onto every requested sample point.  Steps clamped onto a sample
point do not feed back into the controller, so a tiny final gap cannot
collapse the working step size.  Status codes: 0 ok, 1 step-size underflow,
2 jump buffer exhausted, 3 norm underflow without a threshold crossing.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# difference between 5th and embedded 4th order weights
_E1 = 35.0 / 384.0 - 5179.0 / 57600.0
_E3 = 500.0 / 1113.0 - 7571.0 / 16695.0
_E4 = 125.0 / 192.0 - 393.0 / 640.0
_E5 = -2187.0 / 6784.0 + 92097.0 / 339200.0
_E6 = 11.0 / 84.0 - 187.0 / 2100.0
_E7 = -1.0 / 40.0

_H_MIN = 1e-9
_SAFETY = 0.9
_GROW_MAX = 5.0
_SHRINK_MIN = 0.2


@njit(cache=True)
def _step_factor(err):
    if err == 0.0:
        return _GROW_MAX
    if not math.isfinite(err):
        return _SHRINK_MIN
    fac = _SAFETY * err ** (-0.2)
    if fac > _GROW_MAX:
        return _GROW_MAX
    if fac < _SHRINK_MIN:
        return _SHRINK_MIN
    return fac


@njit(cache=True)
def _env_pair(t, pp):
    """Peak-normalized pulse-train shapes (drive 1, drive 2) at time t.

    pp = [center1, center2, width, period, n_cycles].  Only the three
    Gaussians nearest to t contribute; the rest are below exp(-(T1/2T)^2).
    """
    width = pp[2]
    period = pp[3]
    n_cycles = int(pp[4])
    out1 = 0.0
    out2 = 0.0
    for which in range(2):
        c0 = pp[which]
        kc = int(math.floor((t - c0) / period + 0.5))
        acc = 0.0
        for dk in range(-1, 2):
            k = kc + dk
            if k < -1 or k > n_cycles:
                continue
            x = (t - c0 - k * period) / width
            if x * x < 60.0:
                acc += math.exp(-x * x)
        if which == 0:
            out1 = acc
        else:
            out2 = acc
    return out1, out2


@njit(cache=True)
def _rhs_psi(t, psi, out, rows, cols, amps, freqs, pulse, pp, gamma):
    """out = -i H(t) psi - (gamma/2) psi."""
    dim = psi.shape[0]
    for i in range(dim):
        out[i] = -0.5 * gamma[i] * psi[i]
    e1, e2 = _env_pair(t, pp)
    for i in range(rows.shape[0]):
        p = pulse[i]
        if p < 0:
            env = 1.0
        elif p == 0:
            env = e1
        else:
            env = e2
        if env == 0.0:
            continue
        a = amps[i] * env
        ph = freqs[i] * t
        c = complex(a * math.cos(ph), a * math.sin(ph))
        r = rows[i]
        q = cols[i]
        # -i * c * psi[q] added to row r; h.c. to row q
        out[r] += complex(0.0, -1.0) * c * psi[q]
        if r != q:
            out[q] += complex(0.0, -1.0) * np.conj(c) * psi[r]


@njit(cache=True)
def _rhs_rho(t, rho, out, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate):
    """out = -i[H(t), rho] + elementwise damping + diagonal refilling."""
    dim = rho.shape[0]
    for i in range(dim):
        gi = gamma[i]
        for j in range(dim):
            out[i, j] = -0.5 * (gi + gamma[j]) * rho[i, j]
    for c in range(ch_src.shape[0]):
        out[ch_dst[c], ch_dst[c]] += ch_rate[c] * rho[ch_src[c], ch_src[c]]
    e1, e2 = _env_pair(t, pp)
    for i in range(rows.shape[0]):
        p = pulse[i]
        if p < 0:
            env = 1.0
        elif p == 0:
            env = e1
        else:
            env = e2
        if env == 0.0:
            continue
        a = amps[i] * env
        ph = freqs[i] * t
        c = complex(a * math.cos(ph), a * math.sin(ph))
        cc = np.conj(c)
        r = rows[i]
        q = cols[i]
        if r == q:
            for j in range(dim):
                out[r, j] += complex(0.0, -1.0) * c * rho[r, j]
                out[j, r] += complex(0.0, 1.0) * c * rho[j, r]
        else:
            for j in range(dim):
                out[r, j] += complex(0.0, -1.0) * c * rho[q, j]
                out[q, j] += complex(0.0, -1.0) * cc * rho[r, j]
                out[j, q] += complex(0.0, 1.0) * c * rho[j, r]
                out[j, r] += complex(0.0, 1.0) * cc * rho[j, q]


@njit(cache=True)
def _error_norm(diff, y0, y1, rtol, atol):
    n = diff.size
    acc = 0.0
    d = diff.ravel()
    a = y0.ravel()
    b = y1.ravel()
    for i in range(n):
        sc = atol + rtol * max(abs(a[i]), abs(b[i]))
        e = abs(d[i]) / sc
        acc += e * e
    return math.sqrt(acc / n)


@njit(cache=True)
def _propagate_psi(
    t_grid,
    psi0,
    rows,
    cols,
    amps,
    freqs,
    pulse,
    pp,
    gamma,
    rtol,
    atol,
    h0,
    hmax,
):
    """Adaptive propagation sampling the state at every grid time.

    Returns (states (G, D), n_steps, status).
    """
    G = t_grid.shape[0]
    D = psi0.shape[0]
    states = np.zeros((G, D), dtype=np.complex128)
    y = psi0.copy()
    k1 = np.zeros(D, dtype=np.complex128)
    k2 = np.zeros(D, dtype=np.complex128)
    k3 = np.zeros(D, dtype=np.complex128)
    k4 = np.zeros(D, dtype=np.complex128)
    k5 = np.zeros(D, dtype=np.complex128)
    k6 = np.zeros(D, dtype=np.complex128)
    k7 = np.zeros(D, dtype=np.complex128)
    ytmp = np.zeros(D, dtype=np.complex128)
    y5 = np.zeros(D, dtype=np.complex128)
    diff = np.zeros(D, dtype=np.complex128)

    t = t_grid[0]
    states[0] = y
    h = h0
    n_steps = 0
    fresh = True
    for g in range(1, G):
        t_stop = t_grid[g]
        while t < t_stop:
            if h > hmax:
                h = hmax
            clamped = t + h >= t_stop
            hs = t_stop - t if clamped else h
            if fresh:
                _rhs_psi(t, y, k1, rows, cols, amps, freqs, pulse, pp, gamma)
                fresh = False
            for i in range(D):
                ytmp[i] = y[i] + hs * _A21 * k1[i]
            _rhs_psi(t + _C2 * hs, ytmp, k2, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A31 * k1[i] + _A32 * k2[i])
            _rhs_psi(t + _C3 * hs, ytmp, k3, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
            _rhs_psi(t + _C4 * hs, ytmp, k4, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            _rhs_psi(t + _C5 * hs, ytmp, k5, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (
                    _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
                )
            _rhs_psi(t + hs, ytmp, k6, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                y5[i] = y[i] + hs * (
                    _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
                )
            _rhs_psi(t + hs, y5, k7, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                diff[i] = hs * (
                    _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
                )
            err = _error_norm(diff, y, y5, rtol, atol)
            if err <= 1.0 or hs <= _H_MIN * 2.0:
                t = t_stop if clamped else t + hs
                for i in range(D):
                    y[i] = y5[i]
                    k1[i] = k7[i]
                n_steps += 1
                if not clamped:
                    h = hs * _step_factor(err)
            else:
                h = hs * _step_factor(err)
                if h < _H_MIN:
                    return states, n_steps, 1
        states[g] = y
    return states, n_steps, 0


@njit(cache=True)
def _rk4_step_psi(t, h, y, rows, cols, amps, freqs, pulse, pp, gamma, k1, k2, k3, k4, ytmp):
    """Single classical RK4 step, used for jump-time refinement."""
    D = y.shape[0]
    _rhs_psi(t, y, k1, rows, cols, amps, freqs, pulse, pp, gamma)
    for i in range(D):
        ytmp[i] = y[i] + 0.5 * h * k1[i]
    _rhs_psi(t + 0.5 * h, ytmp, k2, rows, cols, amps, freqs, pulse, pp, gamma)
    for i in range(D):
        ytmp[i] = y[i] + 0.5 * h * k2[i]
    _rhs_psi(t + 0.5 * h, ytmp, k3, rows, cols, amps, freqs, pulse, pp, gamma)
    for i in range(D):
        ytmp[i] = y[i] + h * k3[i]
    _rhs_psi(t + h, ytmp, k4, rows, cols, amps, freqs, pulse, pp, gamma)
    for i in range(D):
        y[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True)
def _norm2(y):
    acc = 0.0
    for i in range(y.shape[0]):
        acc += y[i].real * y[i].real + y[i].imag * y[i].imag
    return acc


@njit(cache=True)
def _integrate_rk4_to(t0, t1, y, rows, cols, amps, freqs, pulse, pp, gamma, k1, k2, k3, k4, ytmp):
    """March y from t0 to t1 with fixed RK4 substeps (short spans only)."""
    span = t1 - t0
    if span <= 0.0:
        return
    nsub = int(span / 0.05) + 1
    if nsub > 64:
        nsub = 64
    h = span / nsub
    t = t0
    for _ in range(nsub):
        _rk4_step_psi(t, h, y, rows, cols, amps, freqs, pulse, pp, gamma, k1, k2, k3, k4, ytmp)
        t += h


@njit(cache=True)
def _run_trajectory(
    t_grid,
    psi0,
    rows,
    cols,
    amps,
    freqs,
    pulse,
    pp,
    gamma,
    ch_src,
    ch_dst,
    ch_rate,
    thresholds,
    chan_unis,
    rtol,
    atol,
    h0,
    hmax,
    jump_time_tol,
):
    """Quantum-jump unraveling with pre-drawn randomness.

    The squared norm decays under the non-Hermitian drift; when it crosses
    the current threshold the crossing time is bisected (by re-integration
    from the last accepted point) to jump_time_tol, a channel is chosen by
    the matching pre-drawn uniform with weights rate * |psi_src|^2, and the
    state collapses to the channel's destination keeping the source phase.

    Returns (states (G, D) normalized samples, jump_times, jump_channels,
    n_jumps, n_steps, status).
    """
    G = t_grid.shape[0]
    D = psi0.shape[0]
    B = thresholds.shape[0]
    states = np.zeros((G, D), dtype=np.complex128)
    jump_times = np.zeros(B, dtype=np.float64)
    jump_channels = np.full(B, -1, dtype=np.int64)
    n_jumps = 0

    y = psi0.copy()
    ya = np.zeros(D, dtype=np.complex128)
    k1 = np.zeros(D, dtype=np.complex128)
    k2 = np.zeros(D, dtype=np.complex128)
    k3 = np.zeros(D, dtype=np.complex128)
    k4 = np.zeros(D, dtype=np.complex128)
    k5 = np.zeros(D, dtype=np.complex128)
    k6 = np.zeros(D, dtype=np.complex128)
    k7 = np.zeros(D, dtype=np.complex128)
    ytmp = np.zeros(D, dtype=np.complex128)
    y5 = np.zeros(D, dtype=np.complex128)
    diff = np.zeros(D, dtype=np.complex128)

    t = t_grid[0]
    nrm = math.sqrt(_norm2(y))
    for i in range(D):
        states[0, i] = y[i] / nrm
    r_next = thresholds[0]
    h = h0
    n_steps = 0
    for g in range(1, G):
        t_stop = t_grid[g]
        while t < t_stop:
            if h > hmax:
                h = hmax
            clamped = t + h >= t_stop
            hs = t_stop - t if clamped else h
            _rhs_psi(t, y, k1, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * _A21 * k1[i]
            _rhs_psi(t + _C2 * hs, ytmp, k2, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A31 * k1[i] + _A32 * k2[i])
            _rhs_psi(t + _C3 * hs, ytmp, k3, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
            _rhs_psi(t + _C4 * hs, ytmp, k4, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            _rhs_psi(t + _C5 * hs, ytmp, k5, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                ytmp[i] = y[i] + hs * (
                    _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
                )
            _rhs_psi(t + hs, ytmp, k6, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                y5[i] = y[i] + hs * (
                    _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
                )
            _rhs_psi(t + hs, y5, k7, rows, cols, amps, freqs, pulse, pp, gamma)
            for i in range(D):
                diff[i] = hs * (
                    _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
                )
            err = _error_norm(diff, y, y5, rtol, atol)
            if err <= 1.0 or hs <= _H_MIN * 2.0:
                n2 = _norm2(y5)
                if n2 <= r_next:
                    # jump inside (t, t+hs]: bisect from the pre-step state
                    lo = t
                    hi = t + hs
                    for i in range(D):
                        ya[i] = y[i]
                    while hi - lo > jump_time_tol:
                        mid = 0.5 * (lo + hi)
                        for i in range(D):
                            ytmp[i] = ya[i]
                        _integrate_rk4_to(
                            lo, mid, ytmp, rows, cols, amps, freqs, pulse, pp, gamma,
                            k1, k2, k3, k4, y5,
                        )
                        if _norm2(ytmp) <= r_next:
                            hi = mid
                        else:
                            lo = mid
                            for i in range(D):
                                ya[i] = ytmp[i]
                    t_jump = 0.5 * (lo + hi)
                    for i in range(D):
                        ytmp[i] = ya[i]
                    _integrate_rk4_to(
                        lo, t_jump, ytmp, rows, cols, amps, freqs, pulse, pp, gamma,
                        k1, k2, k3, k4, y5,
                    )
                    if n_jumps >= B:
                        return states, jump_times, jump_channels, n_jumps, n_steps, 2
                    # channel weights at the jump time
                    total = 0.0
                    for c in range(ch_src.shape[0]):
                        amp2 = (
                            ytmp[ch_src[c]].real * ytmp[ch_src[c]].real
                            + ytmp[ch_src[c]].imag * ytmp[ch_src[c]].imag
                        )
                        total += ch_rate[c] * amp2
                    if total <= 0.0:
                        return states, jump_times, jump_channels, n_jumps, n_steps, 3
                    u = chan_unis[n_jumps] * total
                    acc = 0.0
                    chosen = ch_src.shape[0] - 1
                    for c in range(ch_src.shape[0]):
                        amp2 = (
                            ytmp[ch_src[c]].real * ytmp[ch_src[c]].real
                            + ytmp[ch_src[c]].imag * ytmp[ch_src[c]].imag
                        )
                        acc += ch_rate[c] * amp2
                        if u <= acc:
                            chosen = c
                            break
                    # collapse keeping the source amplitude's phase
                    src_amp = ytmp[ch_src[chosen]]
                    mag = abs(src_amp)
                    phase = src_amp / mag if mag > 0.0 else complex(1.0, 0.0)
                    for i in range(D):
                        y[i] = 0.0
                    y[ch_dst[chosen]] = phase
                    jump_times[n_jumps] = t_jump
                    jump_channels[n_jumps] = chosen
                    n_jumps += 1
                    if n_jumps >= B:
                        return states, jump_times, jump_channels, n_jumps, n_steps, 2
                    r_next = thresholds[n_jumps]
                    t = t_jump
                    h = min(h, 1.0)
                    n_steps += 1
                    continue
                if n2 < 1e-24:
                    return states, jump_times, jump_channels, n_jumps, n_steps, 3
                t = t_stop if clamped else t + hs
                for i in range(D):
                    y[i] = y5[i]
                n_steps += 1
                if not clamped:
                    h = hs * _step_factor(err)
            else:
                h = hs * _step_factor(err)
                if h < _H_MIN:
                    return states, jump_times, jump_channels, n_jumps, n_steps, 1
        nrm = math.sqrt(_norm2(y))
        if nrm > 0.0:
            for i in range(D):
                states[g, i] = y[i] / nrm
    return states, jump_times, jump_channels, n_jumps, n_steps, 0


@njit(cache=True)
def _sample_rho(rho, t, energies, obs, pops_row, obs_row):
    """Populations and lab-frame expectations of one interaction-picture snapshot."""
    D = rho.shape[0]
    for i in range(D):
        pops_row[i] = rho[i, i].real
    for o in range(obs.shape[0]):
        acc = complex(0.0, 0.0)
        for r in range(D):
            for s in range(D):
                m = obs[o, s, r]
                if m.real == 0.0 and m.imag == 0.0:
                    continue
                ph = -(energies[r] - energies[s]) * t
                acc += rho[r, s] * complex(math.cos(ph), math.sin(ph)) * m
        obs_row[o] = acc


@njit(cache=True)
def _propagate_rho(
    t_grid,
    rho0,
    rows,
    cols,
    amps,
    freqs,
    pulse,
    pp,
    gamma,
    ch_src,
    ch_dst,
    ch_rate,
    energies,
    obs,
    snap_idx,
    rtol,
    atol,
    h0,
    hmax,
):
    """Master-equation propagation with per-grid-point sampling.

    Returns (pops (G, D), obs_vals (G, n_obs), snaps (S, D, D), rho_final,
    n_steps, status).
    """
    G = t_grid.shape[0]
    D = rho0.shape[0]
    n_obs = obs.shape[0]
    S = snap_idx.shape[0]
    pops = np.zeros((G, D), dtype=np.float64)
    obs_vals = np.zeros((G, n_obs), dtype=np.complex128)
    snaps = np.zeros((S, D, D), dtype=np.complex128)

    y = rho0.copy()
    k1 = np.zeros((D, D), dtype=np.complex128)
    k2 = np.zeros((D, D), dtype=np.complex128)
    k3 = np.zeros((D, D), dtype=np.complex128)
    k4 = np.zeros((D, D), dtype=np.complex128)
    k5 = np.zeros((D, D), dtype=np.complex128)
    k6 = np.zeros((D, D), dtype=np.complex128)
    k7 = np.zeros((D, D), dtype=np.complex128)
    ytmp = np.zeros((D, D), dtype=np.complex128)
    y5 = np.zeros((D, D), dtype=np.complex128)
    diff = np.zeros((D, D), dtype=np.complex128)

    t = t_grid[0]
    _sample_rho(y, t, energies, obs, pops[0], obs_vals[0])
    s_ptr = 0
    if S > 0 and snap_idx[0] == 0:
        snaps[0] = y
        s_ptr = 1
    h = h0
    n_steps = 0
    fresh = True
    for g in range(1, G):
        t_stop = t_grid[g]
        while t < t_stop:
            if h > hmax:
                h = hmax
            clamped = t + h >= t_stop
            hs = t_stop - t if clamped else h
            if fresh:
                _rhs_rho(t, y, k1, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
                fresh = False
            for i in range(D):
                for j in range(D):
                    ytmp[i, j] = y[i, j] + hs * _A21 * k1[i, j]
            _rhs_rho(t + _C2 * hs, ytmp, k2, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
            for i in range(D):
                for j in range(D):
                    ytmp[i, j] = y[i, j] + hs * (_A31 * k1[i, j] + _A32 * k2[i, j])
            _rhs_rho(t + _C3 * hs, ytmp, k3, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
            for i in range(D):
                for j in range(D):
                    ytmp[i, j] = y[i, j] + hs * (_A41 * k1[i, j] + _A42 * k2[i, j] + _A43 * k3[i, j])
            _rhs_rho(t + _C4 * hs, ytmp, k4, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
            for i in range(D):
                for j in range(D):
                    ytmp[i, j] = y[i, j] + hs * (
                        _A51 * k1[i, j] + _A52 * k2[i, j] + _A53 * k3[i, j] + _A54 * k4[i, j]
                    )
            _rhs_rho(t + _C5 * hs, ytmp, k5, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
            for i in range(D):
                for j in range(D):
                    ytmp[i, j] = y[i, j] + hs * (
                        _A61 * k1[i, j]
                        + _A62 * k2[i, j]
                        + _A63 * k3[i, j]
                        + _A64 * k4[i, j]
                        + _A65 * k5[i, j]
                    )
            _rhs_rho(t + hs, ytmp, k6, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
            for i in range(D):
                for j in range(D):
                    y5[i, j] = y[i, j] + hs * (
                        _B1 * k1[i, j]
                        + _B3 * k3[i, j]
                        + _B4 * k4[i, j]
                        + _B5 * k5[i, j]
                        + _B6 * k6[i, j]
                    )
            _rhs_rho(t + hs, y5, k7, rows, cols, amps, freqs, pulse, pp, gamma, ch_src, ch_dst, ch_rate)
            for i in range(D):
                for j in range(D):
                    diff[i, j] = hs * (
                        _E1 * k1[i, j]
                        + _E3 * k3[i, j]
                        + _E4 * k4[i, j]
                        + _E5 * k5[i, j]
                        + _E6 * k6[i, j]
                        + _E7 * k7[i, j]
                    )
            err = _error_norm(diff, y, y5, rtol, atol)
            if err <= 1.0 or hs <= _H_MIN * 2.0:
                t = t_stop if clamped else t + hs
                for i in range(D):
                    for j in range(D):
                        y[i, j] = y5[i, j]
                        k1[i, j] = k7[i, j]
                n_steps += 1
                if not clamped:
                    h = hs * _step_factor(err)
            else:
                h = hs * _step_factor(err)
                if h < _H_MIN:
                    return pops, obs_vals, snaps, y, n_steps, 1
        _sample_rho(y, t_stop, energies, obs, pops[g], obs_vals[g])
        if s_ptr < S and snap_idx[s_ptr] == g:
            snaps[s_ptr] = y
            s_ptr += 1
    return pops, obs_vals, snaps, y, n_steps, 0


@njit(cache=True)
def _propagate_psi_dense(t_grid, psi0, h_static, v_drive, amp1, amp2, pp, carriers, rtol, atol, h0, hmax):
    """Product-basis propagation with the full time-dependent Hamiltonian.

    H(t) = h_static + [amp1*env1(t)*cos(w1 t) + amp2*env2(t)*cos(w2 t)] * v_drive.
    Used as the frame-equivalence oracle on short windows; O(D^2) per
    evaluation, so keep windows modest.
    """
    G = t_grid.shape[0]
    D = psi0.shape[0]
    states = np.zeros((G, D), dtype=np.complex128)

    def rhs(t, yv, out):
        e1, e2 = _env_pair(t, pp)
        dr = amp1 * e1 * math.cos(carriers[0] * t) + amp2 * e2 * math.cos(carriers[1] * t)
        for i in range(D):
            acc = complex(0.0, 0.0)
            for j in range(D):
                acc += (h_static[i, j] + dr * v_drive[i, j]) * yv[j]
            out[i] = complex(0.0, -1.0) * acc

    y = psi0.copy()
    k1 = np.zeros(D, dtype=np.complex128)
    k2 = np.zeros(D, dtype=np.complex128)
    k3 = np.zeros(D, dtype=np.complex128)
    k4 = np.zeros(D, dtype=np.complex128)
    k5 = np.zeros(D, dtype=np.complex128)
    k6 = np.zeros(D, dtype=np.complex128)
    k7 = np.zeros(D, dtype=np.complex128)
    ytmp = np.zeros(D, dtype=np.complex128)
    y5 = np.zeros(D, dtype=np.complex128)
    diff = np.zeros(D, dtype=np.complex128)

    t = t_grid[0]
    states[0] = y
    h = h0
    for g in range(1, G):
        t_stop = t_grid[g]
        while t < t_stop:
            if h > hmax:
                h = hmax
            clamped = t + h >= t_stop
            hs = t_stop - t if clamped else h
            rhs(t, y, k1)
            for i in range(D):
                ytmp[i] = y[i] + hs * _A21 * k1[i]
            rhs(t + _C2 * hs, ytmp, k2)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A31 * k1[i] + _A32 * k2[i])
            rhs(t + _C3 * hs, ytmp, k3)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
            rhs(t + _C4 * hs, ytmp, k4)
            for i in range(D):
                ytmp[i] = y[i] + hs * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            rhs(t + _C5 * hs, ytmp, k5)
            for i in range(D):
                ytmp[i] = y[i] + hs * (
                    _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
                )
            rhs(t + hs, ytmp, k6)
            for i in range(D):
                y5[i] = y[i] + hs * (
                    _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
                )
            rhs(t + hs, y5, k7)
            for i in range(D):
                diff[i] = hs * (
                    _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
                )
            err = _error_norm(diff, y, y5, rtol, atol)
            if err <= 1.0 or hs <= _H_MIN * 2.0:
                t = t_stop if clamped else t + hs
                for i in range(D):
                    y[i] = y5[i]
                if not clamped:
                    h = hs * _step_factor(err)
            else:
                h = hs * _step_factor(err)
                if h < _H_MIN:
                    return states, 1
        states[g] = y
    return states, 0

"""Shared test oracles: asymptotic launch configs and orbit timing."""

import numpy as np

from zenograv.scatter import ScatterConfig


def oracle_config(dist, b, l, v, rtol=1e-10):
    """Launch far enough out that asymptote truncation is ~1e-5 of theta."""
    scale = dist.length_scale()
    return ScatterConfig.for_source(dist, b=b, l=l, v=v,
                                    start_factor=200 * b / scale,
                                    stop_factor=400 * b / scale, rtol=rtol)


def anomaly_crossing_elapsed(traj, phi_target):
    """Elapsed time between the +-phi_target true-anomaly crossings.

    Independent timing oracle: reads the crossing times straight off the
    integrated samples (linear interpolation), with the periapsis
    direction taken from the closest-approach sample.
    """
    rn = np.linalg.norm(traj.x, axis=1)
    ip = int(np.argmin(rn))
    peri = traj.x[ip] / rn[ip]
    phi = np.arccos(np.clip(traj.x @ peri / rn, -1.0, 1.0))
    pre = np.nonzero(phi[:ip] >= phi_target)[0]
    i0 = pre[-1]
    t_pre = np.interp(phi_target, [phi[i0 + 1], phi[i0]],
                      [traj.t[i0 + 1], traj.t[i0]])
    post = np.nonzero(phi[ip:] >= phi_target)[0] + ip
    i1 = post[0]
    t_post = np.interp(phi_target, [phi[i1 - 1], phi[i1]],
                       [traj.t[i1 - 1], traj.t[i1]])
    return t_post - t_pre

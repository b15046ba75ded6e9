"""Compiled inner loops for the mixture sampler.

The Gibbs sweep runs tens of thousands of times over tiny arrays, where
numpy's per-call overhead dominates, so the sweep and the chain driver are
numba-jitted scalar loops. They draw from the same Philox generator object
the rest of the package uses; streams stay deterministic for a fixed seed.

The gamma draw is the same Marsaglia-Tsang squeeze rejection (with the
u^(1/a) boost below shape 1) as distributions.standard_gamma, specialized
to scalars.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["sweep_kernel", "chain_kernel"]


@njit(cache=True)
def _gamma_draw(gen, shape):
    a = shape + 1.0 if shape < 1.0 else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = gen.standard_normal()
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = gen.random()
        if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            break
    g = d * v
    if shape < 1.0:
        g *= gen.random() ** (1.0 / shape)
    return g


@njit(cache=True)
def _sweep(gen, counts, theta, beta, alpha, eta, z, new_theta, new_beta):
    n_bags, n_colours = counts.shape
    n_factories = alpha.size
    logw = np.empty(n_factories)
    # (a) z | theta, beta: categorical on log weights, log-sum-exp normalized
    for b in range(n_bags):
        top = -np.inf
        for f in range(n_factories):
            s = math.log(theta[f])
            for k in range(n_colours):
                c = counts[b, k]
                if c > 0.0:
                    s += c * math.log(beta[f, k])
            logw[f] = s
            if s > top:
                top = s
        total = 0.0
        for f in range(n_factories):
            logw[f] = math.exp(logw[f] - top)
            total += logw[f]
        u = gen.random() * total
        acc = 0.0
        pick = n_factories - 1
        for f in range(n_factories):
            acc += logw[f]
            if u < acc:
                pick = f
                break
        z[b] = pick
    # (b) theta | z
    m = np.zeros(n_factories)
    for b in range(n_bags):
        m[z[b]] += 1.0
    total = 0.0
    for f in range(n_factories):
        g = _gamma_draw(gen, alpha[f] + m[f])
        new_theta[f] = g
        total += g
    for f in range(n_factories):
        new_theta[f] /= total
    # (c) beta_f | z; an empty factory draws from its prior
    pooled = np.zeros((n_factories, n_colours))
    for b in range(n_bags):
        for k in range(n_colours):
            pooled[z[b], k] += counts[b, k]
    for f in range(n_factories):
        total = 0.0
        for k in range(n_colours):
            g = _gamma_draw(gen, eta[k] + pooled[f, k])
            new_beta[f, k] = g
            total += g
        for k in range(n_colours):
            new_beta[f, k] /= total


@njit(cache=True)
def sweep_kernel(gen, counts, theta, beta, alpha, eta):
    n_bags = counts.shape[0]
    z = np.empty(n_bags, dtype=np.int64)
    new_theta = np.empty_like(theta)
    new_beta = np.empty_like(beta)
    _sweep(gen, counts, theta, beta, alpha, eta, z, new_theta, new_beta)
    return z, new_theta, new_beta


@njit(cache=True)
def chain_kernel(gen, counts, alpha, eta, iterations, burn_in, thin):
    n_bags, n_colours = counts.shape
    n_factories = alpha.size
    # initialize theta and beta from their priors
    theta = np.empty(n_factories)
    total = 0.0
    for f in range(n_factories):
        g = _gamma_draw(gen, alpha[f])
        theta[f] = g
        total += g
    for f in range(n_factories):
        theta[f] /= total
    beta = np.empty((n_factories, n_colours))
    for f in range(n_factories):
        total = 0.0
        for k in range(n_colours):
            g = _gamma_draw(gen, eta[k])
            beta[f, k] = g
            total += g
        for k in range(n_colours):
            beta[f, k] /= total
    n_recorded = (iterations - burn_in) // thin
    z_rec = np.empty((n_recorded, n_bags), dtype=np.int64)
    theta_rec = np.empty((n_recorded, n_factories))
    beta_rec = np.empty((n_recorded, n_factories, n_colours))
    z = np.empty(n_bags, dtype=np.int64)
    new_theta = np.empty(n_factories)
    new_beta = np.empty((n_factories, n_colours))
    idx = 0
    for it in range(1, iterations + 1):
        _sweep(gen, counts, theta, beta, alpha, eta, z, new_theta, new_beta)
        theta[:] = new_theta
        beta[:] = new_beta
        if it > burn_in and (it - burn_in) % thin == 0:
            z_rec[idx] = z
            theta_rec[idx] = theta
            beta_rec[idx] = beta
            idx += 1
    return z_rec, theta_rec, beta_rec

// Client-side beta density, used ONLY as a fallback when the service is
// unreachable so the prior sliders stay responsive. Curves from this module
// are tagged approximate in the UI; every authoritative number comes from a
// service response.

import type { Grid } from "./api.js";

// Lanczos approximation (g = 7); plenty for a fallback curve.
const LG = [
  0.99999999999980993, 676.5203681218851, -1259.1392167224028,
  771.32342877765313, -176.61502916214059, 12.507343278686905,
  -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
];
const HALF_LOG_TWO_PI = 0.5 * Math.log(2 * Math.PI);

function logGamma(x: number): number {
  if (x < 0.5) {
    return logGamma(x + 1) - Math.log(x);
  }
  const z = x - 1;
  let acc = LG[0];
  for (let i = 1; i < LG.length; i++) {
    acc += LG[i] / (z + i);
  }
  const base = z + 7.5;
  return HALF_LOG_TWO_PI + (z + 0.5) * Math.log(base) - base + Math.log(acc);
}

/** Beta density on the open grid i/(points+1), matching the service layout. */
export function fallbackBetaGrid(
  alpha: number,
  beta: number,
  points = 257,
): Grid {
  const logNorm = logGamma(alpha) + logGamma(beta) - logGamma(alpha + beta);
  const theta: number[] = [];
  const density: number[] = [];
  for (let i = 1; i <= points; i++) {
    const t = i / (points + 1);
    theta.push(t);
    density.push(
      Math.exp((alpha - 1) * Math.log(t) + (beta - 1) * Math.log(1 - t) - logNorm),
    );
  }
  return { theta, density };
}

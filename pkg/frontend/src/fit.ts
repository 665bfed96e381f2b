/**
 * Log-log least squares over the most significant sweep points: the same
 * point-selection rule as the simulation package's fitter (the n points
 * with the largest scale T), so the annotated slope reproduces it exactly.
 */
import type { SweepRow } from "./csv.js";

export interface FitResult {
  slope: number;
  intercept: number;
  pointsUsed: number;
  residual: number;
}

export function logLogFit(rows: SweepRow[], fitPoints: number): FitResult {
  if (fitPoints < 2) {
    throw new Error("a fit needs at least 2 points");
  }
  if (fitPoints > rows.length) {
    throw new Error(`requested ${fitPoints} fit points, have ${rows.length}`);
  }
  const chosen = [...rows]
    .sort((a, b) => b.t - a.t)
    .slice(0, fitPoints)
    .filter((r) => r.distance > 0);
  if (chosen.length < 2) {
    throw new Error("fewer than 2 positive distances; cannot fit");
  }

  const xs = chosen.map((r) => Math.log(1.0 / r.t));
  const ys = chosen.map((r) => Math.log(r.distance));
  const n = xs.length;
  const xBar = xs.reduce((a, b) => a + b, 0) / n;
  const yBar = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - xBar) * (xs[i] - xBar);
    sxy += (xs[i] - xBar) * (ys[i] - yBar);
  }
  const slope = sxy / sxx;
  const intercept = yBar - slope * xBar;
  const residual = Math.sqrt(
    ys.reduce((acc, y, i) => acc + (y - (slope * xs[i] + intercept)) ** 2, 0) / n,
  );
  return { slope, intercept, pointsUsed: n, residual };
}

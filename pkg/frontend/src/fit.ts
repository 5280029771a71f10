/** Least-squares line fit used to extract decay slopes from artifact tables. */

export interface LineFit {
  slope: number;
  intercept: number;
}

export function fitLine(xs: number[], ys: number[]): LineFit {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error("line fit needs at least two paired points");
  }
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dx = xs[i]! - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i]! - my);
  }
  if (sxx === 0) throw new Error("line fit is degenerate: all x equal");
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}

/**
 * Fitted slope of ln(value) against r.  The first points of the table sit
 * above the geometric envelope, so the fit starts at rMin (default 4).
 */
export function decaySlope(rs: number[], values: number[], rMin = 4): LineFit {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < rs.length; i++) {
    if (rs[i]! >= rMin && values[i]! > 0) {
      xs.push(rs[i]!);
      ys.push(Math.log(values[i]!));
    }
  }
  return fitLine(xs, ys);
}

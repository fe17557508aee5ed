/**
 * The three result figures, each rebuilt purely from the aggregate CSVs:
 *
 *   cdf          empirical CDF of the mean range STD, one curve per
 *                (policy, self-interference level)
 *   si-sweep     per-BS mean range STD (left axis) and optimized transmit
 *                power (right axis) vs the self-interference level
 *   gamma-sweep  per-BS mean range STD vs the communication SINR floor
 */

import { CdfRow, SweepRow, readCdfCsv, readSweepCsv, SchemaError } from "./csv.js";
import { ChartSpec, Series, renderChart } from "./svg.js";

export type FigureKind = "cdf" | "si-sweep" | "gamma-sweep";

const POLICY_LABEL: Record<string, string> = {
  ic: "IC",
  optimized: "Optimized",
};

function policyLabel(policy: string): string {
  return POLICY_LABEL[policy] ?? policy;
}

function sweepLabel(value: number | null): string {
  return value === null ? "" : ` @ ${value} dB`;
}

function groupKeyOrder(values: Array<number | null>): Array<number | null> {
  const seen: Array<number | null> = [];
  for (const v of values) {
    if (!seen.some((s) => s === v)) seen.push(v);
  }
  return seen.sort((a, b) => (a ?? 0) - (b ?? 0));
}

export function cdfChart(rows: CdfRow[]): ChartSpec {
  const series: Series[] = [];
  for (const sweep of groupKeyOrder(rows.map((r) => r.sweepValue))) {
    for (const policy of ["ic", "optimized"]) {
      const pts = rows
        .filter((r) => r.sweepValue === sweep && r.policy === policy)
        .map((r) => [r.valueM, r.cumProb] as [number, number]);
      if (pts.length === 0) continue;
      series.push({
        label: policyLabel(policy) + sweepLabel(sweep),
        points: pts.sort((a, b) => a[0] - b[0]),
        dash: policy === "ic" ? "6 3" : undefined,
      });
    }
  }
  if (series.length === 0) {
    throw new SchemaError("cdf input has no plottable rows");
  }
  return {
    title: "Empirical CDF of the range-measurement STD",
    xLabel: "Mean range STD (m)",
    yLabel: "Cumulative probability",
    series,
  };
}

function perBsSeries(
  rows: SweepRow[],
  policy: string,
  value: (r: SweepRow) => number,
  suffix: string,
  axis: "left" | "right" = "left",
): Series[] {
  const out: Series[] = [];
  const bsIndices = [...new Set(rows.map((r) => r.bsIndex))].sort(
    (a, b) => a - b,
  );
  for (const bs of bsIndices) {
    const pts = rows
      .filter((r) => r.policy === policy && r.bsIndex === bs)
      .sort((a, b) => (a.sweepValue ?? 0) - (b.sweepValue ?? 0))
      .map((r) => [r.sweepValue ?? 0, value(r)] as [number, number]);
    if (pts.length === 0) continue;
    out.push({
      label: `${policyLabel(policy)} BS${bs}${suffix}`,
      points: pts,
      dash: policy === "ic" ? "6 3" : undefined,
      axis,
    });
  }
  return out;
}

export function siSweepChart(rows: SweepRow[]): ChartSpec {
  const series = [
    ...perBsSeries(rows, "ic", (r) => r.meanRangeStdM, " sigma"),
    ...perBsSeries(rows, "optimized", (r) => r.meanRangeStdM, " sigma"),
    ...perBsSeries(rows, "optimized", (r) => r.meanPowerDbm, " power", "right"),
  ];
  if (series.length === 0) {
    throw new SchemaError("sweep input has no plottable rows");
  }
  return {
    title: "Mean range STD and transmit power vs self-interference level",
    xLabel: "Self-interference level (dBm)",
    yLabel: "Mean range STD (m)",
    y2Label: "Mean transmit power (dBm)",
    series,
  };
}

export function gammaSweepChart(rows: SweepRow[]): ChartSpec {
  const series = [
    ...perBsSeries(rows, "ic", (r) => r.meanRangeStdM, ""),
    ...perBsSeries(rows, "optimized", (r) => r.meanRangeStdM, ""),
  ];
  if (series.length === 0) {
    throw new SchemaError("sweep input has no plottable rows");
  }
  return {
    title: "Mean range STD vs communication SINR threshold",
    xLabel: "Communication SINR threshold (dB)",
    yLabel: "Mean range STD (m)",
    series,
  };
}

export function renderFigure(kind: FigureKind, inputPath: string): string {
  switch (kind) {
    case "cdf":
      return renderChart(cdfChart(readCdfCsv(inputPath)));
    case "si-sweep":
      return renderChart(siSweepChart(readSweepCsv(inputPath)));
    case "gamma-sweep":
      return renderChart(gammaSweepChart(readSweepCsv(inputPath)));
    default:
      throw new SchemaError(`unknown figure kind "${kind}"`);
  }
}

/**
 * Panel rendering: one log-log scatter per sweep CSV with the fitted line
 * overlaid and the slope annotated, side by side in a single SVG.
 * Charts are rendered headlessly through echarts' SSR string renderer.
 */
import * as echarts from "echarts";
import { basename } from "node:path";
import type { SweepRow } from "./csv.js";
import { logLogFit, type FitResult } from "./fit.js";

export interface PanelSpec {
  /** source CSV path (used for the panel title) */
  file: string;
  rows: SweepRow[];
  title?: string;
}

export interface RenderOptions {
  fitPoints: number;
  width?: number;
  height?: number;
}

export interface RenderedPanel {
  file: string;
  title: string;
  fit: FitResult;
  svg: string;
}

export function formatSlope(slope: number): string {
  return slope.toFixed(2);
}

function panelChart(spec: PanelSpec, fit: FitResult, width: number, height: number): string {
  const points = spec.rows
    .filter((r) => r.distance > 0)
    .map((r) => [r.invT, r.distance]);
  const invTs = points.map(([x]) => x);
  const linePoints = [Math.min(...invTs), Math.max(...invTs)].map((x) => [
    x,
    Math.exp(fit.intercept + fit.slope * Math.log(x)),
  ]);
  const title = spec.title ?? basename(spec.file).replace(/\.csv$/, "");

  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  chart.setOption({
    animation: false,
    title: {
      text: title,
      subtext: `slope ${formatSlope(fit.slope)} (${fit.pointsUsed} points)`,
      left: "center",
    },
    grid: { left: 70, right: 20, top: 70, bottom: 50 },
    xAxis: {
      type: "log",
      name: "1/T",
      nameLocation: "middle",
      nameGap: 30,
    },
    yAxis: {
      type: "log",
      name: "distance",
      nameLocation: "middle",
      nameGap: 50,
    },
    series: [
      {
        type: "scatter",
        name: "sweep",
        data: points,
        symbolSize: 8,
      },
      {
        type: "line",
        name: "fit",
        data: linePoints,
        showSymbol: false,
        lineStyle: { type: "dashed" },
      },
    ],
  });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

export function renderPanels(specs: PanelSpec[], options: RenderOptions): {
  svg: string;
  panels: RenderedPanel[];
} {
  if (specs.length === 0) {
    throw new Error("no panels to render");
  }
  const width = options.width ?? 440;
  const height = options.height ?? 340;
  const panels: RenderedPanel[] = specs.map((spec) => {
    const fit = logLogFit(spec.rows, options.fitPoints);
    return {
      file: spec.file,
      title: spec.title ?? basename(spec.file).replace(/\.csv$/, ""),
      fit,
      svg: panelChart(spec, fit, width, height),
    };
  });

  const total = width * panels.length;
  const placed = panels
    .map((p, i) => p.svg.replace(/^<svg /, `<svg x="${i * width}" `))
    .join("\n");
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${total}" height="${height}" ` +
    `viewBox="0 0 ${total} ${height}">\n${placed}\n</svg>\n`;
  return { svg, panels };
}

#!/usr/bin/env node
/**
 * ssm-plots: render sweep CSVs from a directory into log-log panels with
 * fitted-slope annotations.
 *
 *   ssm-plots --in runs/dfs4 --fit-points 4 --out fig.svg
 *
 * Every *.csv in the input directory that matches the sweep schema becomes
 * one panel (alphabetical order). PNG output requires the optional
 * rasterizer dependency; SVG always works.
 */
import { readdirSync, writeFileSync } from "node:fs";
import { extname, join } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { parseSweepCsv, SweepSchemaError } from "./csv.js";
import { renderPanels, type PanelSpec } from "./render.js";

async function writeImage(path: string, svg: string): Promise<void> {
  if (extname(path).toLowerCase() !== ".png") {
    writeFileSync(path, svg);
    return;
  }
  let resvg;
  try {
    resvg = await import("@resvg/resvg-js");
  } catch {
    throw new Error(
      "PNG output needs the optional @resvg/resvg-js dependency; " +
        "install it or use an .svg output path",
    );
  }
  const rendered = new resvg.Resvg(svg, { fitTo: { mode: "original" } });
  writeFileSync(path, rendered.render().asPng());
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "directory containing sweep CSVs (or a single CSV file)",
    })
    .option("fit-points", {
      type: "number",
      default: 4,
      describe: "number of largest-T points used for the fit",
    })
    .option("out", {
      type: "string",
      default: "fig.svg",
      describe: "output image path (.svg, or .png with the optional rasterizer)",
    })
    .strict()
    .parse();

  let files: string[];
  if (args.in.endsWith(".csv")) {
    files = [args.in];
  } else {
    files = readdirSync(args.in)
      .filter((f) => f.endsWith(".csv"))
      .sort()
      .map((f) => join(args.in, f));
  }
  if (files.length === 0) {
    console.error(`error: no CSV files found in ${args.in}`);
    return 2;
  }

  try {
    const specs: PanelSpec[] = files.map((file) => ({
      file,
      rows: parseSweepCsv(file),
    }));
    const { svg, panels } = renderPanels(specs, { fitPoints: args.fitPoints });
    await writeImage(args.out, svg);
    for (const p of panels) {
      console.log(
        `${p.title}: slope ${p.fit.slope} intercept ${p.fit.intercept} ` +
          `(${p.fit.pointsUsed} points)`,
      );
    }
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SweepSchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}

#!/usr/bin/env node
/**
 * plot-dd --figure {1|2} --in DIR --out PATH.{png|svg}
 *
 * Reads a simulator CSV bundle and writes the corresponding two-panel
 * figure. The input directory is never modified.
 */

import * as fs from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { loadBundle } from "./figure.js";
import { renderFigure } from "./svg.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("figure", { type: "number", choices: [1, 2], demandOption: true })
    .option("in", { type: "string", demandOption: true, describe: "CSV bundle directory" })
    .option("out", { type: "string", demandOption: true, describe: "output .svg or .png" })
    .option("log-x", { type: "boolean", default: false })
    .option("log-y", { type: "boolean", default: false })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new Error(msg);
    })
    .parse();

  const out = args.out as string;
  const format = out.endsWith(".png") ? "png" : out.endsWith(".svg") ? "svg" : null;
  if (!format) throw new Error(`output path must end in .svg or .png: ${out}`);

  const bundle = loadBundle(args.figure as 1 | 2, args.in as string);
  const svg = renderFigure(bundle.panels, { logX: args["log-x"], logY: args["log-y"] });

  if (format === "svg") {
    fs.writeFileSync(out, svg);
  } else {
    const { Resvg } = await import("@resvg/resvg-js");
    fs.writeFileSync(out, new Resvg(svg).render().asPng());
  }
  const nCurves = bundle.panels[0].curves.length + bundle.panels[1].curves.length;
  console.log(`wrote ${out} (figure ${args.figure}, ${nCurves} curves)`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;

if (invokedDirectly) {
  main(hideBin(process.argv)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`plot-dd: ${err.message}`);
      process.exit(1);
    },
  );
}

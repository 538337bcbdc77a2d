#!/usr/bin/env node
/**
 * Convert a scikit-learn ensemble dump (scripts/dump_sklearn.py) into the
 * verifier's JSON model format.
 *
 *   treeverify-export convert dump.json --out model.json
 *
 * Exit codes: 0 = converted, 2 = bad input.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { ZodError } from "zod";
import { convert } from "./convert.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .command("convert <input>", "convert a source dump to a verifier model", (y) =>
      y
        .positional("input", { type: "string", demandOption: true })
        .option("out", {
          alias: "o",
          type: "string",
          describe: "output model path (default: stdout)",
        })
        .option("quiet", {
          type: "boolean",
          default: false,
          describe: "suppress precision warnings",
        }),
    )
    .demandCommand(1)
    .strict()
    .parse();

  const input = argv.input as string;
  let document: unknown;
  try {
    document = JSON.parse(readFileSync(input, "utf-8"));
  } catch (err) {
    console.error(`error: cannot read ${input}: ${(err as Error).message}`);
    return 2;
  }

  try {
    const { model, warnings } = convert(document);
    if (!argv.quiet) {
      for (const w of warnings) console.error(`precision: ${w}`);
    }
    const text = JSON.stringify(model, null, 2) + "\n";
    if (argv.out) {
      writeFileSync(argv.out as string, text);
      console.error(
        `wrote ${argv.out}: ${model.trees.length} trees, ` +
          `${model.nb_inputs} inputs, ${model.nb_outputs} outputs, ` +
          `${model.post_process} post-processing`,
      );
    } else {
      process.stdout.write(text);
    }
    return 0;
  } catch (err) {
    if (err instanceof ZodError) {
      console.error(`error: ${input} is not a valid ensemble dump:`);
      for (const issue of err.issues.slice(0, 5)) {
        console.error(`  ${issue.path.join(".")}: ${issue.message}`);
      }
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 2;
  }
}

main().then((code) => {
  process.exitCode = code;
});

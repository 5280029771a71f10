/** Command-line figure rendering: main.ts <kind> <output.svg> <artifact...> */

import { PlotKind, render } from "./plots.js";

const KINDS: PlotKind[] = ["decay", "domain-heatmap", "dk-curve", "bound-vs-n", "lens"];

export function main(argv: string[]): number {
  const [kind, output, ...inputs] = argv;
  if (!kind || !output || inputs.length === 0) {
    process.stderr.write(`usage: main.ts <${KINDS.join("|")}> <output.svg> <artifact...>\n`);
    return 1;
  }
  if (!KINDS.includes(kind as PlotKind)) {
    process.stderr.write(`unknown plot kind "${kind}"\n`);
    return 1;
  }
  try {
    render({ kind: kind as PlotKind, output, input: inputs.length === 1 ? inputs[0]! : inputs });
  } catch (err) {
    process.stderr.write(`${String(err)}\n`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}

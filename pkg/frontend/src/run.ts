// Shared argv wiring for the plot scripts: read one input file, render,
// write one SVG. Anything that goes wrong exits 2 with a message.

import { readFileSync, writeFileSync } from "node:fs";

export function runScript(
  name: string, render: (content: string) => string): void {
  const [input, output] = process.argv.slice(2);
  if (!input || !output) {
    console.error(`usage: ${name} <input> <output.svg>`);
    process.exit(2);
  }
  try {
    writeFileSync(output, render(readFileSync(input, "utf8")));
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    console.error(`${name}: ${message}`);
    process.exit(2);
  }
}

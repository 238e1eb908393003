import { parseSnapshot } from "./snapshot.js";
import { renderSnapshot } from "./figures.js";
import { runScript } from "./run.js";

runScript("plot-snapshot", (content) =>
  renderSnapshot(parseSnapshot(content)));

import { parseTrajectory } from "./csv.js";
import { renderFunnel } from "./figures.js";
import { runScript } from "./run.js";

runScript("plot-funnel", (content) =>
  renderFunnel(parseTrajectory(content)));

import { parseTrajectory } from "./csv.js";
import { renderTracking } from "./figures.js";
import { runScript } from "./run.js";

runScript("plot-tracking", (content) =>
  renderTracking(parseTrajectory(content)));

import { bootApp } from "./app.js";

const SAMPLE = [
  "Lighthouses were never meant to be seen by day. Their keepers judged a " +
    "lamp by how far it carried on a moonless night, and the towers were " +
    "painted in bold stripes only so sailors could tell one coast from " +
    "another before dark.",
  "The first rotating beacons turned on beds of mercury. A ton of glass " +
    "and brass floated on a few liters of liquid metal, so perfectly " +
    "balanced that a child could spin the whole assembly with one hand.",
  "Automation retired the keepers but not the buildings. Most towers " +
    "still stand because tearing down a lighthouse costs more than leaving " +
    "it to the gulls.",
].join("\n\n");

const root = document.getElementById("app");
if (root) {
  bootApp(root, { initialText: SAMPLE }).catch((err) => {
    root.textContent = `failed to start: ${err instanceof Error ? err.message : err}`;
  });
}

export * from "./protocol.js";
export * from "./client.js";
export * from "./viewmodel.js";
export * from "./timeline-panel.js";
export * from "./effects-panel.js";
export * from "./viewport.js";
export * from "./record-mode.js";

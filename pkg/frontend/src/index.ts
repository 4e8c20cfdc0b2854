export { App, type AppOptions } from "./app.js";
export { HttpApi, Stream, ApiError, type SocketFactory, type SocketLike } from "./api.js";
export { InkCapture, bindPointerEvents, type PointerLike } from "./capture.js";
export {
  mountUi,
  renderAll,
  renderCode,
  renderGutter,
  renderInk,
  renderFeedforward,
  renderDiff,
  renderConsole,
  type RenderHandlers,
} from "./render.js";
export {
  applyServerEvent,
  echoStroke,
  dropStrokes,
  expireHighlights,
  initialViewState,
  type ViewState,
  type Tool,
  type InkEntry,
  type Highlight,
} from "./view.js";
export * from "./types.js";

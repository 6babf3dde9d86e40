// 2D scene viewport.
//
// Rendering is a pure function of (scene document, state snapshot,
// camera, view size): it returns an ordered list of draw commands and
// touches nothing. Replaying the same inputs yields the same list, so
// the visual state sequence is reproducible from a recorded event log.
//
// Top-down mode draws the floor plan, object markers, character paths,
// and decoration badges; ground-level mode is a simple 2.5D side
// projection (fidelity is out of scope).

import {
  DecorationDoc,
  SceneDoc,
  SceneObjectDoc,
  StateDoc,
} from "./protocol.js";
import { Camera } from "./viewmodel.js";

export interface ViewSize {
  width: number;
  height: number;
}

export type MarkerShape = "circle" | "square" | "diamond" | "wedge";

export type DrawCommand =
  | { kind: "polygon"; role: "region"; name: string; points: [number, number][] }
  | { kind: "line"; role: "wall" | "arrow" | "ground"; from: [number, number]; to: [number, number] }
  | { kind: "polyline"; role: "path"; objectId: string; points: [number, number][] }
  | { kind: "marker"; objectId: string; shape: MarkerShape; at: [number, number]; label: string }
  | { kind: "badge"; objectId: string; badge: string; at: [number, number] };

const SHAPE_FOR_CLASS: Record<SceneObjectDoc["class"], MarkerShape> = {
  character: "circle",
  prop: "square",
  marker: "diamond",
  camera: "wedge",
};

// how many metres of ground the view spans vertically per metre of height
const VIEW_SPAN_PER_HEIGHT = 1.2;

/** World ground point (x, z) to screen pixels under the camera. */
export function projectTopDown(
  camera: Camera,
  view: ViewSize,
  wx: number,
  wz: number,
): [number, number] {
  const metersVisible = camera.heightM * VIEW_SPAN_PER_HEIGHT;
  const pxPerMeter = (view.height / metersVisible) * camera.zoom;
  const sx = view.width / 2 + (wx - camera.panX) * pxPerMeter;
  const sy = view.height / 2 + (wz - camera.panY) * pxPerMeter;
  return [sx, sy];
}

function groundOf(position: [number, number, number]): [number, number] {
  return [position[0], position[2]];
}

function decorationCommands(
  objectId: string,
  at3: [number, number, number],
  decorations: DecorationDoc[],
  toScreen: (wx: number, wz: number) => [number, number],
): DrawCommand[] {
  const out: DrawCommand[] = [];
  for (const deco of decorations) {
    if (deco.kind === "arrow") {
      const from = deco.from as [number, number, number] | undefined;
      const to = deco.to as [number, number, number] | undefined;
      if (from !== undefined && to !== undefined) {
        out.push({
          kind: "line",
          role: "arrow",
          from: toScreen(from[0], from[2]),
          to: toScreen(to[0], to[2]),
        });
      }
    } else {
      out.push({
        kind: "badge",
        objectId,
        badge: deco.kind,
        at: toScreen(at3[0], at3[2]),
      });
    }
  }
  return out;
}

/**
 * Top-down plan view. `paths` holds ground polylines (one per character)
 * computed elsewhere, e.g. from a trace.
 */
export function renderTopDown(
  scene: SceneDoc,
  state: StateDoc,
  camera: Camera,
  view: ViewSize,
  paths?: Record<string, [number, number][]>,
): DrawCommand[] {
  let cam = camera;
  if (camera.follow !== null) {
    const target = state.objects[camera.follow];
    if (target !== undefined) {
      const [fx, fz] = groundOf(target.position);
      cam = { ...camera, panX: fx, panY: fz };
    }
  }
  const toScreen = (wx: number, wz: number) => projectTopDown(cam, view, wx, wz);
  const out: DrawCommand[] = [];

  for (const region of scene.regions) {
    out.push({
      kind: "polygon",
      role: "region",
      name: region.name,
      points: region.polygon.map(([x, z]) => toScreen(x, z)),
    });
  }
  for (const [a, b] of scene.walls) {
    out.push({
      kind: "line",
      role: "wall",
      from: toScreen(a[0], a[1]),
      to: toScreen(b[0], b[1]),
    });
  }
  if (paths !== undefined) {
    for (const [objectId, pts] of Object.entries(paths)) {
      out.push({
        kind: "polyline",
        role: "path",
        objectId,
        points: pts.map(([x, z]) => toScreen(x, z)),
      });
    }
  }
  for (const obj of scene.objects) {
    const snap = state.objects[obj.id];
    const position = snap?.position ?? obj.position;
    const [gx, gz] = groundOf(position);
    out.push({
      kind: "marker",
      objectId: obj.id,
      shape: SHAPE_FOR_CLASS[obj.class],
      at: toScreen(gx, gz),
      label: obj.name,
    });
    if (snap?.decorations !== undefined) {
      out.push(...decorationCommands(obj.id, position, snap.decorations, toScreen));
    }
  }
  return out;
}

/** Side-on 2.5D projection: x runs along the screen, height runs up. */
export function renderGroundLevel(
  scene: SceneDoc,
  state: StateDoc,
  camera: Camera,
  view: ViewSize,
): DrawCommand[] {
  const pxPerMeter = 24 * camera.zoom;
  const depthSkew = 0.35; // oblique cue for the z axis
  const toScreen = (x: number, y: number, z: number): [number, number] => [
    view.width / 2 + (x - camera.panX + z * depthSkew) * pxPerMeter,
    view.height * 0.8 - (y + z * depthSkew * 0.5) * pxPerMeter,
  ];
  const out: DrawCommand[] = [];
  out.push({
    kind: "line",
    role: "ground",
    from: [0, view.height * 0.8],
    to: [view.width, view.height * 0.8],
  });
  for (const obj of scene.objects) {
    const snap = state.objects[obj.id];
    const position = snap?.position ?? obj.position;
    const [sx, sy] = toScreen(position[0], position[1], position[2]);
    out.push({
      kind: "marker",
      objectId: obj.id,
      shape: SHAPE_FOR_CLASS[obj.class],
      at: [sx, sy],
      label: obj.name,
    });
    if (snap?.decorations !== undefined) {
      for (const deco of snap.decorations) {
        if (deco.kind !== "arrow") {
          out.push({ kind: "badge", objectId: obj.id, badge: deco.kind, at: [sx, sy] });
        }
      }
    }
  }
  return out;
}

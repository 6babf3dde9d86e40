// Editor view model: a seq-stamped mirror of the service's project.
//
// The service is the single source of truth. The mirror only ever moves
// forward to the snapshot carried by a newer state-delta; a stale delta
// (seq at or below what is already applied) is dropped, so the view never
// diverges from the last acked state.

import {
  EventEnvelope,
  SceneDoc,
  StateDeltaPayload,
  TimelineDoc,
  TransportTickPayload,
  TransportView,
} from "./protocol.js";

export type ViewportMode = "top-down" | "ground-level";

export interface Selection {
  trackId: string | null;
  slotId: string | null;
  effectId: string | null;
}

export interface Camera {
  panX: number;
  panY: number;
  zoom: number;
  mode: ViewportMode;
  heightM: number;
  /** Camera-follows-character toggle; experimental. */
  follow: string | null;
}

// observation presets: top-down starts at 20 m and may descend to 10 m
export const TOP_DOWN_HEIGHT_M = 20;
export const MIN_PRESET_HEIGHT_M = 10;

export const MIN_ZOOM = 0.1;
export const MAX_ZOOM = 40;

export class EditorViewModel {
  timeline: TimelineDoc | null = null;
  scene: SceneDoc | null = null;
  transport: TransportView | null = null;

  /** Seq of the newest applied state-delta; the mirror never moves backwards. */
  appliedSeq = 0;

  readonly selection: Selection = { trackId: null, slotId: null, effectId: null };

  readonly camera: Camera = {
    panX: 0,
    panY: 0,
    zoom: 1,
    mode: "top-down",
    heightM: TOP_DOWN_HEIGHT_M,
    follow: null,
  };

  /** Seed the mirror from REST documents before the channel opens. */
  prime(timeline: TimelineDoc, scene: SceneDoc, transport: TransportView): void {
    this.timeline = timeline;
    this.scene = scene;
    this.transport = transport;
  }

  /** Returns true when the delta advanced the mirror, false when stale. */
  applyDelta(event: EventEnvelope & { payload: StateDeltaPayload }): boolean {
    if (event.seq <= this.appliedSeq) return false;
    this.appliedSeq = event.seq;
    this.timeline = event.payload.timeline;
    this.pruneSelection();
    return true;
  }

  applyTick(event: EventEnvelope & { payload: TransportTickPayload }): void {
    const p = event.payload;
    this.transport = {
      mode: p.mode,
      cursor: p.cursor,
      duration: p.duration,
      frame_rate: p.frame_rate,
    };
  }

  // -- selection -----------------------------------------------------------------

  select(partial: Partial<Selection>): void {
    Object.assign(this.selection, partial);
  }

  selectedSlot(): { trackId: string; slotId: string } | null {
    const { trackId, slotId } = this.selection;
    return trackId !== null && slotId !== null ? { trackId, slotId } : null;
  }

  /** Drop selected entities that no longer exist in the snapshot. */
  private pruneSelection(): void {
    if (this.timeline === null) return;
    const sel = this.selection;
    const track = this.timeline.tracks.find((t) => t.id === sel.trackId);
    if (sel.trackId !== null && track === undefined) {
      sel.trackId = sel.slotId = sel.effectId = null;
      return;
    }
    if (sel.slotId === null) return;
    const slot = track?.slots.find((s) => s.id === sel.slotId);
    if (slot === undefined) {
      sel.slotId = sel.effectId = null;
      return;
    }
    if (sel.effectId !== null && !slot.effects.some((e) => e.id === sel.effectId)) {
      sel.effectId = null;
    }
  }

  // -- camera -----------------------------------------------------------------------

  pan(dx: number, dy: number): void {
    this.camera.panX += dx;
    this.camera.panY += dy;
  }

  zoomBy(factor: number): void {
    const z = this.camera.zoom * factor;
    this.camera.zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, z));
  }

  /** The paper-height observation preset: straight down from 20 m. */
  topDownPreset(): void {
    this.camera.mode = "top-down";
    this.camera.heightM = TOP_DOWN_HEIGHT_M;
  }

  /** Descend toward the floor; preset mode floors at 10 m. */
  descend(meters: number): void {
    this.camera.heightM = Math.max(MIN_PRESET_HEIGHT_M, this.camera.heightM - meters);
  }

  groundLevel(): void {
    this.camera.mode = "ground-level";
  }

  followCharacter(objectId: string | null): void {
    this.camera.follow = objectId;
  }

  // -- gesture support ---------------------------------------------------------------

  /** Deep copy of the mirrored timeline, for pre-gesture baselines. */
  timelineBaseline(): TimelineDoc | null {
    return this.timeline === null
      ? null
      : (JSON.parse(JSON.stringify(this.timeline)) as TimelineDoc);
  }
}

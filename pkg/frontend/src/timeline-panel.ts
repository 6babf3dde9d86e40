// Timeline panel: the gesture-to-command surface.
//
// Layout follows the animation editor: a top bar for creating tracks and
// storing/loading, a right bar for creating and deleting slots, a track
// area for sorting and mute/lock flags, and the slot area where dragging
// moves or trims a slot. Every completed gesture maps to exactly one
// engine command. Drags render optimistically, but a rejected command
// snaps the view model back to the pre-gesture snapshot and surfaces the
// service's reason, so no optimistic edit ever survives a rejection.

import { CommandPort } from "./client.js";
import { ServiceError, SlotDoc, TimelineDoc, TrackDoc } from "./protocol.js";
import { EditorViewModel } from "./viewmodel.js";

export interface PanelMessage {
  code: string;
  message: string;
}

type Gesture =
  | {
      kind: "move";
      slotId: string;
      baseline: TimelineDoc;
      length: number;
      ghostStart: number;
      destTrackId: string;
      originPx: number;
    }
  | {
      kind: "trim";
      slotId: string;
      edge: "start" | "end";
      baseline: TimelineDoc;
      ghostStart: number;
      ghostEnd: number;
      originPx: number;
    };

export interface GestureOutcome {
  ok: boolean;
  error: PanelMessage | null;
}

const DEFAULT_PX_PER_FRAME = 4;

export class TimelinePanel {
  /** Most recent rejection, for the inline error strip. */
  lastError: PanelMessage | null = null;

  private readonly port: CommandPort;
  private readonly vm: EditorViewModel;
  private readonly pxPerFrame: number;
  private gesture: Gesture | null = null;

  constructor(port: CommandPort, vm: EditorViewModel, pxPerFrame = DEFAULT_PX_PER_FRAME) {
    this.port = port;
    this.vm = vm;
    this.pxPerFrame = pxPerFrame;
  }

  // -- top bar --------------------------------------------------------------------

  async createTrack(name?: string): Promise<string> {
    const args: Record<string, unknown> = {};
    if (name !== undefined) args.name = name;
    const ack = await this.run("create_track", args);
    return String(ack.track_id);
  }

  // -- right bar ------------------------------------------------------------------

  async createSlot(trackId: string, start: number, end: number): Promise<string> {
    // UI-originated intervals are always integral frames
    const ack = await this.run("create_slot", {
      track_id: trackId,
      start: Math.round(start),
      end: Math.round(end),
    });
    return String(ack.slot_id);
  }

  async deleteSlot(slotId: string): Promise<void> {
    await this.run("delete_slot", { slot_id: slotId });
  }

  async deleteTrack(trackId: string): Promise<void> {
    await this.run("delete_track", { track_id: trackId });
  }

  // -- track area ------------------------------------------------------------------

  async reorderTrack(trackId: string, newIndex: number): Promise<void> {
    await this.run("reorder_track", {
      track_id: trackId,
      new_index: Math.round(newIndex),
    });
  }

  async toggleMute(trackId: string): Promise<void> {
    const track = this.findTrack(trackId);
    await this.run("set_track_flags", { track_id: trackId, muted: !track.muted });
  }

  async toggleLock(trackId: string): Promise<void> {
    const track = this.findTrack(trackId);
    await this.run("set_track_flags", { track_id: trackId, locked: !track.locked });
  }

  // -- slot area: drag gestures ------------------------------------------------------

  /** Begin dragging a whole slot; the baseline is the snap-back target. */
  beginSlotMove(slotId: string, pointerPx = 0): void {
    const { slot, track } = this.locateSlot(slotId);
    this.gesture = {
      kind: "move",
      slotId,
      baseline: this.baseline(),
      length: slot.end - slot.start,
      ghostStart: slot.start,
      destTrackId: track.id,
      originPx: pointerPx,
    };
  }

  /** Begin dragging one edge of a slot. */
  beginSlotTrim(slotId: string, edge: "start" | "end", pointerPx = 0): void {
    const { slot } = this.locateSlot(slotId);
    this.gesture = {
      kind: "trim",
      slotId,
      edge,
      baseline: this.baseline(),
      ghostStart: slot.start,
      ghostEnd: slot.end,
      originPx: pointerPx,
    };
  }

  /**
   * Pointer moved. Pixels snap to whole frames; the ghost applies to the
   * mirrored snapshot optimistically so the slot tracks the pointer.
   */
  dragTo(pointerPx: number, destTrackId?: string): void {
    const g = this.gesture;
    if (g === null) throw new Error("no drag in progress");
    const frames = Math.round((pointerPx - g.originPx) / this.pxPerFrame);
    if (g.kind === "move") {
      const origin = this.slotIn(g.baseline, g.slotId);
      g.ghostStart = Math.max(0, origin.slot.start + frames);
      if (destTrackId !== undefined) g.destTrackId = destTrackId;
      this.applyGhost(g.slotId, g.ghostStart, g.ghostStart + g.length, g.destTrackId);
    } else {
      const origin = this.slotIn(g.baseline, g.slotId);
      if (g.edge === "start") {
        g.ghostStart = Math.min(origin.slot.end, Math.max(0, origin.slot.start + frames));
      } else {
        g.ghostEnd = Math.max(origin.slot.start, origin.slot.end + frames);
      }
      this.applyGhost(g.slotId, g.ghostStart, g.ghostEnd);
    }
  }

  /** Pointer released: exactly one command for the whole gesture. */
  async commitGesture(): Promise<GestureOutcome> {
    const g = this.gesture;
    if (g === null) throw new Error("no drag in progress");
    this.gesture = null;
    try {
      if (g.kind === "move") {
        await this.port.send("move_slot", {
          slot_id: g.slotId,
          dest_track_id: g.destTrackId,
          new_start: g.ghostStart,
        });
      } else {
        const args: Record<string, unknown> = { slot_id: g.slotId };
        if (g.edge === "start") args.new_start = g.ghostStart;
        else args.new_end = g.ghostEnd;
        await this.port.send("trim_slot", args);
      }
      return { ok: true, error: null };
    } catch (err) {
      this.snapBack(g.baseline, err);
      return { ok: false, error: this.lastError };
    }
  }

  /** Abandon the drag; the view returns to the pre-gesture snapshot. */
  cancelGesture(): void {
    const g = this.gesture;
    if (g === null) return;
    this.gesture = null;
    this.vm.timeline = g.baseline;
  }

  // -- transport strip ----------------------------------------------------------------

  async clickPlay(): Promise<void> {
    await this.run("play");
  }

  async clickPause(): Promise<void> {
    await this.run("pause");
  }

  async scrub(frame: number): Promise<void> {
    await this.run("seek", { frame: Math.round(frame) });
  }

  async step(): Promise<void> {
    await this.run("step");
  }

  // -- internals -------------------------------------------------------------------------

  private async run(
    op: string,
    args?: Record<string, unknown>,
  ): Promise<Record<string, unknown>> {
    try {
      return await this.port.send(op, args);
    } catch (err) {
      this.remember(err);
      throw err;
    }
  }

  private remember(err: unknown): void {
    if (err instanceof ServiceError) {
      this.lastError = { code: err.code, message: err.message };
    } else {
      this.lastError = { code: "ClientError", message: String(err) };
    }
  }

  private snapBack(baseline: TimelineDoc, err: unknown): void {
    this.vm.timeline = baseline;
    this.remember(err);
  }

  private baseline(): TimelineDoc {
    const copy = this.vm.timelineBaseline();
    if (copy === null) throw new Error("no timeline mirrored yet");
    return copy;
  }

  private findTrack(trackId: string): TrackDoc {
    const timeline = this.vm.timeline;
    const track = timeline?.tracks.find((t) => t.id === trackId);
    if (track === undefined) throw new Error(`no track ${trackId} in the mirror`);
    return track;
  }

  private locateSlot(slotId: string): { track: TrackDoc; slot: SlotDoc } {
    const timeline = this.vm.timeline;
    if (timeline === null) throw new Error("no timeline mirrored yet");
    return this.slotIn(timeline, slotId);
  }

  private slotIn(timeline: TimelineDoc, slotId: string): { track: TrackDoc; slot: SlotDoc } {
    for (const track of timeline.tracks) {
      const slot = track.slots.find((s) => s.id === slotId);
      if (slot !== undefined) return { track, slot };
    }
    throw new Error(`no slot ${slotId} in the mirror`);
  }

  /** Write the ghost into the mirror (optimistic display only). */
  private applyGhost(
    slotId: string,
    start: number,
    end: number,
    destTrackId?: string,
  ): void {
    const timeline = this.vm.timeline;
    if (timeline === null) return;
    const { track, slot } = this.slotIn(timeline, slotId);
    slot.start = start;
    slot.end = end;
    if (destTrackId !== undefined && destTrackId !== track.id) {
      const dest = timeline.tracks.find((t) => t.id === destTrackId);
      if (dest !== undefined) {
        track.slots = track.slots.filter((s) => s.id !== slotId);
        dest.slots.push(slot);
        dest.slots.sort((a, b) => a.start - b.start);
      }
    }
  }
}

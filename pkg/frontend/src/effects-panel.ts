// Effects and props panels.
//
// The effects panel has the three classic regions: the list of effects
// attached to the selected slot, the palette of available effect types,
// and the parameter controls for the selected effect. Parameter edits
// debounce into one set_effect_params command per quiet period. The
// props panel instantiates registered object descriptors into the scene
// through the documented file round trip (download, insert, upload),
// since scene authoring is not a timeline edit.

import { CommandPort } from "./client.js";
import { ServiceError, SlotDoc, EffectDoc, SessionDoc } from "./protocol.js";
import { EditorViewModel } from "./viewmodel.js";

// -- available effects: the engine's registry, mirrored -----------------------------

export type ParamKind = "bool" | "int" | "enum" | "object-id";

export interface ParamControl {
  name: string;
  kind: ParamKind;
  label: string;
  choices?: string[];
  default: unknown;
  required: boolean;
}

export interface EffectTypeEntry {
  type: string;
  label: string;
  params: ParamControl[];
}

export const AVAILABLE_EFFECTS: EffectTypeEntry[] = [
  {
    type: "RigidTransform",
    label: "Rigid transform",
    params: [
      { name: "physics", kind: "bool", label: "Physics", default: false, required: false },
    ],
  },
  { type: "PoseTrack", label: "Pose track", params: [] },
  { type: "InteractiveState", label: "Interactive state", params: [] },
  {
    type: "FloatingArrows",
    label: "Floating arrows",
    params: [
      { name: "dest", kind: "object-id", label: "Destination", default: null, required: true },
      { name: "cycle", kind: "int", label: "Cycle (frames)", default: 30, required: false },
    ],
  },
  {
    type: "Fire",
    label: "Fire",
    params: [
      { name: "apply_fire", kind: "bool", label: "Apply Fire", default: true, required: false },
      {
        name: "explosion_type",
        kind: "enum",
        label: "Explosion Type",
        choices: ["none", "burst", "directional"],
        default: "none",
        required: false,
      },
      {
        name: "firewall_type",
        kind: "enum",
        label: "Firewall Type",
        choices: ["none", "line", "ring"],
        default: "none",
        required: false,
      },
    ],
  },
];

const PARAM_DEBOUNCE_MS = 250;

export class EffectsPanel {
  /** Inline error at the add-effect control (Constraint 2 and friends). */
  addError: { code: string; message: string } | null = null;
  /** Inline error at the params pane. */
  paramError: { code: string; message: string } | null = null;

  private readonly port: CommandPort;
  private readonly vm: EditorViewModel;
  private readonly debounceMs: number;
  private pendingParams = new Map<string, Record<string, unknown>>();
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(port: CommandPort, vm: EditorViewModel, debounceMs = PARAM_DEBOUNCE_MS) {
    this.port = port;
    this.vm = vm;
    this.debounceMs = debounceMs;
  }

  // -- the three panel states ---------------------------------------------------------

  /** Effects attached to the selected slot. */
  attached(): EffectDoc[] {
    const slot = this.selectedSlotDoc();
    return slot === null ? [] : slot.effects;
  }

  /** The palette of effect types that can be added. */
  available(): EffectTypeEntry[] {
    return AVAILABLE_EFFECTS;
  }

  /** Parameter controls for the selected effect, with current values. */
  paramControls(): Array<ParamControl & { value: unknown }> {
    const effect = this.selectedEffectDoc();
    if (effect === null) return [];
    const entry = AVAILABLE_EFFECTS.find((e) => e.type === effect.type);
    if (entry === undefined) return [];
    return entry.params.map((control) => ({
      ...control,
      value: control.name in effect.params ? effect.params[control.name] : control.default,
    }));
  }

  // -- commands ----------------------------------------------------------------------

  async addEffect(
    effectType: string,
    targetId: string,
    params?: Record<string, unknown>,
  ): Promise<string | null> {
    const slot = this.vm.selection.slotId;
    if (slot === null) throw new Error("select a slot first");
    this.addError = null;
    try {
      const ack = await this.port.send("attach_effect", {
        slot_id: slot,
        effect_type: effectType,
        target_id: targetId,
        ...(params !== undefined ? { params } : {}),
      });
      const effectId = String(ack.effect_id);
      this.vm.select({ effectId });
      return effectId;
    } catch (err) {
      if (err instanceof ServiceError) {
        this.addError = { code: err.code, message: err.message };
        return null;
      }
      throw err;
    }
  }

  async removeEffect(effectId: string): Promise<void> {
    await this.port.send("detach_effect", { effect_id: effectId });
  }

  /**
   * Record a parameter edit; edits within the debounce window coalesce
   * into a single set_effect_params command per effect.
   */
  editParam(effectId: string, name: string, value: unknown): void {
    const staged = this.pendingParams.get(effectId) ?? {};
    staged[name] = value;
    this.pendingParams.set(effectId, staged);
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      void this.flushParams();
    }, this.debounceMs);
  }

  /** Send staged parameter edits now (also called by the debounce timer). */
  async flushParams(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const staged = this.pendingParams;
    this.pendingParams = new Map();
    for (const [effectId, params] of staged) {
      try {
        await this.port.send("set_effect_params", { effect_id: effectId, params });
        this.paramError = null;
      } catch (err) {
        if (err instanceof ServiceError) {
          this.paramError = { code: err.code, message: err.message };
        } else {
          throw err;
        }
      }
    }
  }

  // -- internals ----------------------------------------------------------------------

  private selectedSlotDoc(): SlotDoc | null {
    const { slotId } = this.vm.selection;
    if (slotId === null || this.vm.timeline === null) return null;
    for (const track of this.vm.timeline.tracks) {
      const slot = track.slots.find((s) => s.id === slotId);
      if (slot !== undefined) return slot;
    }
    return null;
  }

  private selectedEffectDoc(): EffectDoc | null {
    const slot = this.selectedSlotDoc();
    const { effectId } = this.vm.selection;
    if (slot === null || effectId === null) return null;
    return slot.effects.find((e) => e.id === effectId) ?? null;
  }
}

// -- props panel -----------------------------------------------------------------------

export interface PropDescriptor {
  id: string;
  name: string;
  class: "character" | "prop" | "marker" | "camera";
  triggerable?: boolean;
  states?: string[];
  payload?: string;
}

/** The registered descriptors the palette offers. */
export const PROP_PALETTE: PropDescriptor[] = [
  { id: "police_avatar", name: "Police avatar", class: "character" },
  { id: "knife", name: "Knife", class: "prop" },
  { id: "bat", name: "Bat", class: "prop" },
  { id: "bin", name: "Bin", class: "prop", triggerable: true, states: ["upright", "knocked"] },
  { id: "camera_preset", name: "Camera preset", class: "camera" },
];

export interface FilePort {
  downloadFile(): Promise<Uint8Array>;
  uploadFile(bytes: Uint8Array): Promise<SessionDoc>;
}

interface ProjectManifest {
  scene: {
    objects: Array<Record<string, unknown>>;
    floor_plan?: { spawns?: Array<{ name: string; point: [number, number] }> };
  };
  [key: string]: unknown;
}

export class PropsPanel {
  private readonly files: FilePort;

  constructor(files: FilePort) {
    this.files = files;
  }

  palette(): PropDescriptor[] {
    return PROP_PALETTE;
  }

  /**
   * Instantiate a descriptor at a spawn point (or the origin). The scene
   * is not a timeline edit, so this goes through the documented project
   * file round trip; the PUT broadcasts a load_file delta to every
   * client, which re-syncs their mirrors.
   */
  async addProp(
    descriptor: PropDescriptor,
    objectId: string,
    spawnName?: string,
  ): Promise<void> {
    const bytes = await this.files.downloadFile();
    const manifest = JSON.parse(new TextDecoder().decode(bytes)) as ProjectManifest;
    const spawns = manifest.scene.floor_plan?.spawns ?? [];
    const named = spawns.find((s) => s.name === spawnName)?.point;
    const at: [number, number] = named ?? spawns[0]?.point ?? [0, 0];
    manifest.scene.objects.push({
      id: objectId,
      name: descriptor.name,
      class: descriptor.class,
      initial: {
        position: [at[0], 0, at[1]],
        rotation: [1, 0, 0, 0],
        scale: [1, 1, 1],
      },
      triggerable: descriptor.triggerable ?? false,
      states: descriptor.states ?? [],
      initial_state: descriptor.states !== undefined ? descriptor.states[0] : null,
      payload: descriptor.payload ?? "",
      attachment: null,
    });
    const body = new TextEncoder().encode(JSON.stringify(manifest));
    await this.files.uploadFile(body);
  }
}

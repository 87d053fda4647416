// Session core: package parsing, selection recording, progress, export.
// Pure state transitions; persistence goes through an injected ProgressStore.

import {
  EvalItem,
  EvalPackage,
  ExportError,
  ItemView,
  OPTION_COUNT,
  PackageError,
  ProgressStore,
  SelectionError,
} from './types.js';
import { csvField } from './csv.js';

export interface SessionState {
  pkg: EvalPackage;
  cursor: number;
  selections: Map<string, number[]>;
}

const PACKAGE_FIELDS = new Set([
  'package_id',
  'seed',
  'generator',
  'texture_names',
  'items',
]);

const ITEM_FIELDS = new Set([
  'record_id',
  'image_ref',
  'options',
  'tid_option_index',
]);

export function parsePackage(text: string): EvalPackage {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new PackageError(`package is not valid JSON: ${(e as Error).message}`);
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new PackageError('package must be a JSON object');
  }
  const obj = doc as Record<string, unknown>;
  checkKeys(obj, PACKAGE_FIELDS, 'package');

  const packageId = obj.package_id;
  if (typeof packageId !== 'string' || packageId === '') {
    throw new PackageError('package_id must be a nonempty string');
  }
  if (typeof obj.seed !== 'number' || !Number.isInteger(obj.seed)) {
    throw new PackageError('seed must be an integer');
  }
  if (typeof obj.generator !== 'string') {
    throw new PackageError('generator must be a string');
  }
  const names = obj.texture_names;
  if (typeof names !== 'object' || names === null || Array.isArray(names)) {
    throw new PackageError('texture_names must be an object');
  }
  for (const [key, value] of Object.entries(names)) {
    if (!/^\d+$/.test(key) || typeof value !== 'string' || value === '') {
      throw new PackageError(`bad texture name entry ${key}`);
    }
  }
  const textureNames = names as Record<string, string>;

  if (!Array.isArray(obj.items) || obj.items.length === 0) {
    throw new PackageError('items must be a nonempty array');
  }
  const seen = new Set<string>();
  const items = obj.items.map((raw, i) => {
    const item = parseItem(raw, i, textureNames);
    if (seen.has(item.record_id)) {
      throw new PackageError(`duplicate record id ${item.record_id}`);
    }
    seen.add(item.record_id);
    return item;
  });

  return {
    package_id: packageId,
    seed: obj.seed,
    generator: obj.generator,
    texture_names: textureNames,
    items,
  };
}

function parseItem(
  raw: unknown,
  index: number,
  textureNames: Record<string, string>,
): EvalItem {
  if (typeof raw !== 'object' || raw === null || Array.isArray(raw)) {
    throw new PackageError(`item ${index} must be an object`);
  }
  const obj = raw as Record<string, unknown>;
  checkKeys(obj, ITEM_FIELDS, `item ${index}`);
  const recordId = obj.record_id;
  if (typeof recordId !== 'string' || recordId === '') {
    throw new PackageError(`item ${index}: record_id must be a nonempty string`);
  }
  if (typeof obj.image_ref !== 'string' || obj.image_ref === '') {
    throw new PackageError(`item ${index}: image_ref must be a nonempty string`);
  }
  const options = obj.options;
  if (
    !Array.isArray(options) ||
    options.length !== OPTION_COUNT ||
    !options.every((v) => typeof v === 'number' && Number.isInteger(v))
  ) {
    throw new PackageError(
      `item ${index}: options must be ${OPTION_COUNT} integer texture ids`,
    );
  }
  if (new Set(options).size !== OPTION_COUNT) {
    throw new PackageError(`item ${index}: options must be distinct`);
  }
  for (const id of options) {
    if (!(String(id) in textureNames)) {
      throw new PackageError(`item ${index}: no name for texture id ${id}`);
    }
  }
  const tid = obj.tid_option_index;
  if (
    typeof tid !== 'number' ||
    !Number.isInteger(tid) ||
    tid < 0 ||
    tid >= OPTION_COUNT
  ) {
    throw new PackageError(`item ${index}: bad answer position`);
  }
  return {
    record_id: recordId,
    image_ref: obj.image_ref,
    options: options as number[],
    tid_option_index: tid,
  };
}

function checkKeys(
  obj: Record<string, unknown>,
  allowed: Set<string>,
  label: string,
): void {
  for (const key of allowed) {
    if (!(key in obj)) {
      throw new PackageError(`${label} is missing field ${key}`);
    }
  }
  for (const key of Object.keys(obj)) {
    if (!allowed.has(key)) {
      throw new PackageError(`${label} has unexpected field ${key}`);
    }
  }
}

export function loadPackage(text: string, store: ProgressStore): SessionState {
  const pkg = parsePackage(text);
  const selections = new Map<string, number[]>();

  const saved = store.load(pkg.package_id);
  if (saved !== null) {
    if (saved.package_id !== pkg.package_id) {
      throw new PackageError('saved progress belongs to a different package');
    }
    const known = new Set(pkg.items.map((it) => it.record_id));
    for (const [recordId, raw] of Object.entries(saved.selections)) {
      if (!known.has(recordId)) {
        throw new PackageError(
          `saved progress does not match this package: unknown record ${recordId}`,
        );
      }
      selections.set(recordId, normalizeSelection(raw));
    }
  }

  return { pkg, cursor: firstUnanswered(pkg.items, selections), selections };
}

function firstUnanswered(
  items: EvalItem[],
  selections: Map<string, number[]>,
): number {
  for (let i = 0; i < items.length; i++) {
    if (!selections.has(items[i].record_id)) {
      return i;
    }
  }
  return items.length;
}

function normalizeSelection(raw: number[]): number[] {
  if (!Array.isArray(raw) || raw.length === 0) {
    throw new SelectionError('selection must be a nonempty list of indices');
  }
  const unique = [...new Set(raw)].sort((a, b) => a - b);
  for (const idx of unique) {
    if (!Number.isInteger(idx) || idx < 0 || idx >= OPTION_COUNT) {
      throw new SelectionError(`selection index ${idx} is out of range`);
    }
  }
  return unique;
}

export function currentItem(state: SessionState): EvalItem | null {
  return state.cursor < state.pkg.items.length
    ? state.pkg.items[state.cursor]
    : null;
}

export function answeredCount(state: SessionState): number {
  return state.selections.size;
}

export function isComplete(state: SessionState): boolean {
  return state.selections.size === state.pkg.items.length;
}

export function recordSelection(
  state: SessionState,
  indices: number[],
  store: ProgressStore,
): SessionState {
  const item = currentItem(state);
  if (item === null) {
    throw new SelectionError('no current item; the session is complete');
  }
  const normalized = normalizeSelection(indices);

  const selections = new Map(state.selections);
  selections.set(item.record_id, normalized);
  persist(state.pkg, selections, store);

  return { pkg: state.pkg, cursor: state.cursor + 1, selections };
}

export function goBack(state: SessionState): SessionState {
  return { ...state, cursor: Math.max(0, state.cursor - 1) };
}

export function goTo(state: SessionState, index: number): SessionState {
  if (!Number.isInteger(index) || index < 0 || index >= state.pkg.items.length) {
    throw new SelectionError(`no item at position ${index}`);
  }
  return { ...state, cursor: index };
}

function persist(
  pkg: EvalPackage,
  selections: Map<string, number[]>,
  store: ProgressStore,
): void {
  const out: Record<string, number[]> = {};
  for (const item of pkg.items) {
    const sel = selections.get(item.record_id);
    if (sel !== undefined) {
      out[item.record_id] = sel;
    }
  }
  store.save({ package_id: pkg.package_id, selections: out });
}

export function itemView(state: SessionState): ItemView | null {
  const item = currentItem(state);
  if (item === null) {
    return null;
  }
  return {
    imageRef: item.image_ref,
    position: state.cursor + 1,
    total: state.pkg.items.length,
    answered: state.selections.size,
    options: item.options.map((id, index) => ({
      index,
      label: state.pkg.texture_names[String(id)],
    })),
    selected: state.selections.get(item.record_id) ?? [],
  };
}

export function exportResponses(state: SessionState): string {
  if (state.selections.size === 0) {
    throw new ExportError('nothing answered yet; nothing to export');
  }
  const lines = ['package_id,record_id,selected_indices'];
  for (const item of state.pkg.items) {
    const sel = state.selections.get(item.record_id);
    if (sel !== undefined) {
      lines.push(
        [
          csvField(state.pkg.package_id),
          csvField(item.record_id),
          csvField(sel.join(';')),
        ].join(','),
      );
    }
  }
  return lines.join('\n') + '\n';
}

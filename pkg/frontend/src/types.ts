// Shared shapes for the annotation session.
//
// EvalItem mirrors the package file, including the hidden answer field the
// scorer uses. That field must never reach the page or the export, so the
// view layer works from ItemView, which does not carry it.

export const OPTION_COUNT = 4;

export interface EvalItem {
  record_id: string;
  image_ref: string;
  options: number[];
  tid_option_index: number;
}

export interface EvalPackage {
  package_id: string;
  seed: number;
  generator: string;
  texture_names: Record<string, string>;
  items: EvalItem[];
}

export interface SavedProgress {
  package_id: string;
  selections: Record<string, number[]>;
}

export interface ProgressStore {
  load(packageId: string): SavedProgress | null;
  save(progress: SavedProgress): void;
  clear(packageId: string): void;
}

export interface ItemView {
  imageRef: string;
  position: number;
  total: number;
  answered: number;
  options: { index: number; label: string }[];
  selected: number[];
}

export class PackageError extends Error {}

export class SelectionError extends Error {}

export class ExportError extends Error {}

// Progress persistence keyed by package id.

import { ProgressStore, SavedProgress } from './types.js';

const KEY_PREFIX = 'annotator-progress:';

export class LocalStorageProgressStore implements ProgressStore {
  load(packageId: string): SavedProgress | null {
    const raw = localStorage.getItem(KEY_PREFIX + packageId);
    if (raw === null) {
      return null;
    }
    try {
      const obj = JSON.parse(raw) as SavedProgress;
      if (typeof obj.package_id !== 'string' || typeof obj.selections !== 'object') {
        throw new Error('bad shape');
      }
      return obj;
    } catch {
      // A damaged save is dropped rather than blocking the package.
      console.warn('discarding unreadable saved progress for', packageId);
      localStorage.removeItem(KEY_PREFIX + packageId);
      return null;
    }
  }

  save(progress: SavedProgress): void {
    localStorage.setItem(
      KEY_PREFIX + progress.package_id,
      JSON.stringify(progress),
    );
  }

  clear(packageId: string): void {
    localStorage.removeItem(KEY_PREFIX + packageId);
  }
}

export class MemoryProgressStore implements ProgressStore {
  private saved = new Map<string, string>();

  load(packageId: string): SavedProgress | null {
    const raw = this.saved.get(packageId);
    return raw === undefined ? null : (JSON.parse(raw) as SavedProgress);
  }

  save(progress: SavedProgress): void {
    this.saved.set(progress.package_id, JSON.stringify(progress));
  }

  clear(packageId: string): void {
    this.saved.delete(packageId);
  }
}

// Browser wiring: file input, option toggles, navigation, CSV download.

import {
  SessionState,
  exportResponses,
  goBack,
  isComplete,
  itemView,
  loadPackage,
  recordSelection,
} from './session.js';
import { renderBanner, renderCompletion, renderItemView } from './render.js';
import { LocalStorageProgressStore } from './storage.js';

const store = new LocalStorageProgressStore();
let state: SessionState | null = null;
let pending = new Set<number>();

const fileInput = document.getElementById('package-file') as HTMLInputElement;
const stage = document.getElementById('stage') as HTMLElement;
const banner = document.getElementById('banner') as HTMLElement;
const submitBtn = document.getElementById('submit') as HTMLButtonElement;
const backBtn = document.getElementById('back') as HTMLButtonElement;
const exportBtn = document.getElementById('export') as HTMLButtonElement;

fileInput.addEventListener('change', () => {
  const file = fileInput.files?.[0];
  if (!file) {
    return;
  }
  file.text().then(
    (text) => {
      banner.innerHTML = '';
      try {
        state = loadPackage(text, store);
        pending = new Set();
        render();
      } catch (e) {
        state = null;
        banner.innerHTML = renderBanner((e as Error).message);
        stage.innerHTML = '';
      }
    },
    (e) => {
      banner.innerHTML = renderBanner(`cannot read file: ${e}`);
    },
  );
});

stage.addEventListener('click', (event) => {
  const target = (event.target as HTMLElement).closest('button.option');
  if (!target || state === null) {
    return;
  }
  const index = Number(target.getAttribute('data-index'));
  if (pending.has(index)) {
    pending.delete(index);
  } else {
    pending.add(index);
  }
  target.classList.toggle('selected');
  target.setAttribute('aria-pressed', String(pending.has(index)));
});

submitBtn.addEventListener('click', () => {
  if (state === null) {
    return;
  }
  banner.innerHTML = '';
  try {
    state = recordSelection(state, [...pending], store);
    pending = new Set();
    render();
  } catch (e) {
    banner.innerHTML = renderBanner((e as Error).message);
  }
});

backBtn.addEventListener('click', () => {
  if (state === null) {
    return;
  }
  banner.innerHTML = '';
  state = goBack(state);
  pending = new Set();
  render();
});

exportBtn.addEventListener('click', () => {
  if (state === null) {
    return;
  }
  banner.innerHTML = '';
  try {
    const csv = exportResponses(state);
    const blob = new Blob([csv], { type: 'text/csv' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = `${state.pkg.package_id}-responses.csv`;
    link.click();
    URL.revokeObjectURL(link.href);
  } catch (e) {
    banner.innerHTML = renderBanner((e as Error).message);
  }
});

function render(): void {
  if (state === null) {
    return;
  }
  const view = itemView(state);
  if (view === null) {
    stage.innerHTML = renderCompletion(
      state.selections.size,
      state.pkg.items.length,
    );
  } else {
    // Re-entering an answered item shows its stored selection for revision.
    pending = new Set(view.selected);
    stage.innerHTML = renderItemView(view);
  }
  submitBtn.disabled = view === null;
  backBtn.disabled = state.cursor === 0;
  exportBtn.disabled = state.selections.size === 0;
  if (isComplete(state) && view === null) {
    exportBtn.focus();
  }
}

// HTML builders for the annotation page. Pure string functions so tests can
// assert exactly what reaches the page.

import { ItemView } from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderItemView(view: ItemView): string {
  const options = view.options
    .map((opt) => {
      const pressed = view.selected.includes(opt.index);
      return (
        `<button class="option${pressed ? ' selected' : ''}" ` +
        `data-index="${opt.index}" aria-pressed="${pressed}">` +
        `${opt.index + 1}. ${escapeHtml(opt.label)}</button>`
      );
    })
    .join('\n');
  return `
<div class="progress">Item ${view.position} of ${view.total} (${view.answered} answered)</div>
<figure class="image-panel">
  <img src="${escapeHtml(view.imageRef)}" alt="image under evaluation"
       onerror="this.replaceWith(Object.assign(document.createElement('div'),{className:'image-missing',textContent:this.alt}))">
  <figcaption>${escapeHtml(view.imageRef)}</figcaption>
</figure>
<p class="prompt">Which textures do you see? Select one or more options.</p>
<div class="options">
${options}
</div>`;
}

export function renderCompletion(answered: number, total: number): string {
  return `
<div class="progress">All ${total} items answered (${answered} saved)</div>
<p class="prompt">The session is complete. Export your responses below.</p>`;
}

export function renderBanner(message: string): string {
  return `<div class="banner" role="alert">${escapeHtml(message)}</div>`;
}

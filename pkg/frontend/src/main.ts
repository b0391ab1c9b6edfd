import { App, type AppElements } from './app.js';
import { HttpAuditApi } from './api.js';

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

const params = new URLSearchParams(window.location.search);
const apiBase = params.get('api') ?? 'http://127.0.0.1:8000';

const elements: AppElements = {
  matchSelect: el<HTMLSelectElement>('match-select'),
  sliceSlider: el<HTMLInputElement>('slice-slider'),
  sliceLabel: el('slice-label'),
  prevButton: el<HTMLButtonElement>('slice-prev'),
  nextButton: el<HTMLButtonElement>('slice-next'),
  timeline: el('timeline'),
  trace: el('trace-panel'),
  whatif: el('whatif-panel'),
  status: el('status'),
};

const app = new App(new HttpAuditApi(apiBase), elements);
void app.start();

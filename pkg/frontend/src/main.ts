/**
 * Entry point. The page is normally served by the review service itself
 * (its /ui mount), so the API lives on the same origin; an explicit
 * ?api=http://host:port query parameter points the panel elsewhere during
 * development.
 */

import { ApiClient } from './api.js';
import { App } from './app.js';

const params = new URLSearchParams(window.location.search);
const base = params.get('api') ?? '';

const root = document.getElementById('app');
if (root === null) throw new Error('missing #app container');

void new App(root, new ApiClient(base)).load();

import { ApiClient, AppConfig } from './api.js';
import { App } from './app.js';

async function bootstrap(): Promise<void> {
	const resp = await fetch('./config.json');
	const config = (await resp.json()) as AppConfig;
	document.title = config.title;
	const root = document.getElementById('app');
	if (!root) throw new Error('missing #app element');
	const app = new App(root, new ApiClient(config.apiBase), config.title);
	await app.init();
}

void bootstrap();

// Browser entry point: boot against the same origin that served us.

import { ApiClient } from "./api.js";
import { initApp } from "./app.js";

const app = initApp(document, new ApiClient(""), { reviewer: "browser" });
void app.boot();

import { LabelServiceClient } from "./api.js";
import { AnnotatorApp } from "./app.js";

const app = new AnnotatorApp(new LabelServiceClient(""));
void app.start();

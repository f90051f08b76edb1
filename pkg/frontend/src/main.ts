import { mountApp } from "./app";
import "./style.css";

mountApp(document.getElementById("app")!);

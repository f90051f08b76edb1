/** 3D model panel: fetch OFF text (cached upstream), parse it client-side and
 * render with orbit controls. A fetch or parse failure shows a placeholder
 * instead of breaking the page. */

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import { parseOff, type ParsedOff } from "./off";

export function geometryFromOff(off: ParsedOff): THREE.BufferGeometry {
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute("position", new THREE.BufferAttribute(off.positions, 3));
  geometry.setIndex(new THREE.BufferAttribute(off.triangles, 1));
  geometry.computeVertexNormals();
  geometry.computeBoundingSphere();
  return geometry;
}

/** Where parsed models end up; swapped for a recording stub in tests. */
export interface RenderSurface {
  display(geometry: THREE.BufferGeometry, id: string): void;
  placeholder(id: string, reason: string): void;
  dispose(): void;
}

export class WebGLSurface implements RenderSurface {
  private readonly renderer: THREE.WebGLRenderer;
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private readonly controls: OrbitControls;
  private current: THREE.Group | null = null;
  private readonly overlay: HTMLDivElement;

  constructor(private readonly container: HTMLElement) {
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setPixelRatio(Math.min(window.devicePixelRatio, 2));
    this.renderer.setClearColor(0x10141c);
    container.appendChild(this.renderer.domElement);

    this.overlay = document.createElement("div");
    this.overlay.className = "viewer-overlay";
    container.appendChild(this.overlay);

    this.camera = new THREE.PerspectiveCamera(45, 1, 0.01, 1000);
    this.camera.position.set(2.2, 1.6, 2.2);
    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;

    this.scene.add(new THREE.HemisphereLight(0xffffff, 0x334455, 1.1));
    const key = new THREE.DirectionalLight(0xffffff, 1.4);
    key.position.set(3, 5, 4);
    this.scene.add(key);

    this.resize();
    window.addEventListener("resize", this.resize);
    this.renderer.setAnimationLoop(() => {
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    });
  }

  private resize = (): void => {
    const w = Math.max(1, this.container.clientWidth);
    const h = Math.max(1, this.container.clientHeight);
    this.renderer.setSize(w, h);
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
  };

  display(geometry: THREE.BufferGeometry, id: string): void {
    this.clear();
    this.overlay.textContent = id;
    const group = new THREE.Group();
    const shaded = new THREE.Mesh(
      geometry,
      new THREE.MeshStandardMaterial({
        color: 0x7aa2d6,
        flatShading: true,
        side: THREE.DoubleSide,
      }),
    );
    const wire = new THREE.LineSegments(
      new THREE.WireframeGeometry(geometry),
      new THREE.LineBasicMaterial({ color: 0x1c2533, transparent: true, opacity: 0.35 }),
    );
    group.add(shaded, wire);

    const sphere = geometry.boundingSphere;
    if (sphere) {
      group.position.copy(sphere.center).multiplyScalar(-1);
      const r = Math.max(sphere.radius, 1e-6);
      this.camera.position.setLength(r * 2.8);
      this.controls.target.set(0, 0, 0);
    }
    this.scene.add(group);
    this.current = group;
  }

  placeholder(id: string, reason: string): void {
    this.clear();
    this.overlay.textContent = `${id}: ${reason}`;
  }

  private clear(): void {
    if (this.current) {
      this.scene.remove(this.current);
      this.current = null;
    }
  }

  dispose(): void {
    window.removeEventListener("resize", this.resize);
    this.renderer.setAnimationLoop(null);
    this.renderer.dispose();
  }
}

export class ModelViewer {
  constructor(
    private readonly surface: RenderSurface,
    private readonly fetchMesh: (id: string) => Promise<string>,
  ) {}

  async show(id: string): Promise<"rendered" | "placeholder"> {
    try {
      const text = await this.fetchMesh(id);
      this.surface.display(geometryFromOff(parseOff(text)), id);
      return "rendered";
    } catch (err) {
      this.surface.placeholder(id, err instanceof Error ? err.message : String(err));
      return "placeholder";
    }
  }
}

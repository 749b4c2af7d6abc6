import * as THREE from "three";
import { MeshData } from "../protocol.js";

export function meshDataToGeometry(mesh: MeshData): THREE.BufferGeometry {
  const geometry = new THREE.BufferGeometry();
  const positions = new Float32Array(mesh.vertices.length * 3);
  mesh.vertices.forEach(([x, y, z], i) => {
    positions[3 * i] = x;
    positions[3 * i + 1] = y;
    positions[3 * i + 2] = z;
  });
  const indices = new Uint32Array(mesh.triangles.length * 3);
  mesh.triangles.forEach(([a, b, c], i) => {
    indices[3 * i] = a;
    indices[3 * i + 1] = b;
    indices[3 * i + 2] = c;
  });
  geometry.setAttribute("position", new THREE.BufferAttribute(positions, 3));
  geometry.setIndex(new THREE.BufferAttribute(indices, 1));
  geometry.computeVertexNormals();
  return geometry;
}

export function strokeTube(
  points: THREE.Vector3[],
  radius: number,
  sides: number,
  color: number,
): THREE.Mesh {
  const curve = new THREE.CatmullRomCurve3(points, false, "catmullrom", 0.5);
  const segments = Math.max(2, points.length * 6);
  const geometry = new THREE.TubeGeometry(curve, segments, radius, sides, false);
  const material = new THREE.MeshStandardMaterial({ color, roughness: 0.6 });
  return new THREE.Mesh(geometry, material);
}

package shapes;

public class Point {
    private final double x;
    private final double y;

    public Point(double x, double y) { this.x = x; this.y = y; }

    public double cross(Point other) {
        return x * other.y - y * other.x;
    }

    public static double distance(Point p, Point q) {
        double dx = p.x - q.x;
        double dy = p.y - q.y;
        return Math.sqrt(dx * dx + dy * dy);
    }

    public Point scaled(double k) {
        if (k == 1) {
            return this;
        }
        return new Point(x * k, y * k);
    }

    static class Cache {
        void clear() { if (true) { reset(); } }
    }
}

package shapes;

public class Polygon extends Shape {
    private Point[] vertices;
    private Logger log;

    public Polygon(String name, Point[] vertices) {
        super(name);
        this.vertices = vertices;
    }

    public double area() {
        double sum = 0;
        for (int i = 0; i < vertices.length; i++) {
            Point a = vertices[i];
            Point b = vertices[(i + 1) % vertices.length];
            sum += a.cross(b);
        }
        log.debug("area computed: if while for && ||");
        return MathUtil.abs(sum) / 2;
    }

    public int sides() {
        return vertices.length;
    }
}
